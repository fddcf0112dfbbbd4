#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curvlab/metric_catalog.hpp"

namespace curvlab {

enum class Condition {
    anco_all,   // lambda_1 diam^2 >= -1/i
    sum_n,      // (lambda_1 + .. + lambda_n) diam^2 >= -n/i
    two_sided,  // -eps_i <= lambda_1 diam^2  and  lambda_N diam^2 <= Lambda
};

std::string to_string(Condition c);
Condition parse_condition(const std::string& s);

// One-parameter family of catalog metrics. Member i (1-based) is `base` with
// every "{t}" replaced by schedule[i-1].
struct FamilySpec {
    std::string base;
    std::vector<double> schedule;
    Condition condition = Condition::anco_all;
    double lambda_upper = 0;                // Lambda, two_sided only
    std::optional<int> count;               // partial-sum length; sum_n defaults to m/2
    std::vector<double> epsilon;            // two_sided lower thresholds; default 1/i
    std::optional<double> diameter_factor;  // replace stored diameter by factor*value, flagged exact
    int sample_points = 64;
};

std::vector<double> harmonic_schedule(int count);  // 1, 1/2, ..., 1/count
std::vector<double> linear_schedule(int count);    // 1, 2, ..., count

ManifoldPtr family_member(const FamilySpec& fam, std::size_t i);

struct MemberSpectrum {
    int index = 0;
    double param = 0;
    ManifoldPtr spec;
    std::size_t points = 0;
    double lambda_min = 0;            // worst case over sampled points
    double lambda_max = 0;
    std::vector<double> partial_sums; // partial_sums[c-1] = min over points of lambda_1 + .. + lambda_c
    std::vector<double> spectrum;     // full spectrum, homogeneous members only
    Diameter diameter;
};

// Homogeneous members use their single spectrum; chart members take the
// worst case over about `sample_points` quadrature nodes.
std::vector<MemberSpectrum> spectrum_over_family(const FamilySpec& fam, int sample_points);

struct MemberRecord {
    int index = 0;
    double param = 0;
    std::size_t points = 0;
    double lambda_min = 0;
    double lambda_max = 0;
    std::vector<double> partial_sums;
    double diameter = 0;
    DiameterKind diameter_kind = DiameterKind::exact;
    double scaled_quantity = 0;
    double threshold = 0;
    std::optional<double> scaled_upper;  // lambda_N diam^2, two_sided only
    double slack = 0;
    bool pass = false;
};

struct AncoReport {
    Condition condition = Condition::anco_all;
    std::string base;
    std::vector<MemberRecord> members;
    bool all_pass = false;
    // Smallest i with every member j >= i passing. A passing tail reindexes to
    // a sequence satisfying the condition for all i.
    std::optional<int> first_certified_index;
    double worst_slack = 0;
    std::string sampling_caveat;
    std::string expected_conclusion;  // empty when no conclusion applies
    std::optional<int> chi_metadata;
    std::optional<bool> metadata_consistent;
};

AncoReport certify_condition(const FamilySpec& fam);

// max_k |lambda_k(c^2 g) diam^2(c^2 g) - lambda_k(g) diam^2(g)|, relative to
// max_k |lambda_k(g)| diam^2(g) at each sampled point
double scale_invariance_check(const ManifoldPtr& spec, double c, int sample_points = 16);

struct KappaRecord {
    int index = 0;
    double kappa = 0;            // (lambda_1 + .. + lambda_n) / n at diameter 1
    double threshold = 0;        // -1/i
    double weitzenbock_bound = 0;  // -C(n)/i
    bool certified = false;      // member satisfies the sum_n condition
    bool bound_holds = false;    // kappa k (2n-k) >= -C(n)/i for all k
};

std::vector<KappaRecord> kappa_sequence(const FamilySpec& fam);

}  // namespace curvlab
