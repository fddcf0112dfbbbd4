#include "curvlab/anco_analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "curvlab/curvature_engine.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/quadrature.hpp"
#include "curvlab/weitzenbock.hpp"

namespace curvlab {

std::string to_string(Condition c) {
    switch (c) {
        case Condition::anco_all: return "anco_all";
        case Condition::sum_n: return "sum_n";
        case Condition::two_sided: return "two_sided";
    }
    return "?";
}

Condition parse_condition(const std::string& s) {
    if (s == "anco_all") return Condition::anco_all;
    if (s == "sum_n") return Condition::sum_n;
    if (s == "two_sided") return Condition::two_sided;
    throw ConfigurationError("unknown condition '" + s + "' (anco_all, sum_n, two_sided)");
}

std::vector<double> harmonic_schedule(int count) {
    std::vector<double> s;
    for (int i = 1; i <= count; ++i) s.push_back(1.0 / i);
    return s;
}

std::vector<double> linear_schedule(int count) {
    std::vector<double> s;
    for (int i = 1; i <= count; ++i) s.push_back(i);
    return s;
}

ManifoldPtr family_member(const FamilySpec& fam, std::size_t i) {
    if (i >= fam.schedule.size()) throw DomainError("family member index out of range");
    const double t = fam.schedule[i];
    if (!(t > 0.0)) throw ConfigurationError("family parameters must be positive");
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), t);
    const std::string value(buf, res.ptr);
    std::string desc = fam.base;
    const std::string key = "{t}";
    if (desc.find(key) == std::string::npos) throw ConfigurationError("family base needs a {t} placeholder");
    for (std::size_t pos; (pos = desc.find(key)) != std::string::npos;) desc.replace(pos, key.size(), value);
    ManifoldPtr spec = catalog_get(desc);
    if (fam.diameter_factor) {
        if (!spec->diameter) throw UnsupportedError(spec->name + ": no diameter metadata to rescale");
        auto copy = std::make_shared<ManifoldSpec>(*spec);
        copy->diameter = Diameter{spec->diameter->value * *fam.diameter_factor, DiameterKind::exact};
        spec = copy;
    }
    return spec;
}

namespace {

std::vector<std::vector<double>> sample_spectra(const ManifoldPtr& spec, int sample_points) {
    std::vector<std::vector<double>> out;
    const int d = spec->point_dimension();
    if (d == 0) {
        out.push_back(assemble_curv_op(curvature_at(*spec)).spectrum);
        return out;
    }
    const int order = std::max(2, static_cast<int>(std::ceil(std::pow(std::max(1, sample_points), 1.0 / d) - 1e-9)));
    const QuadratureGrid grid(spec, order);
    for (std::size_t i = 0; i < grid.size(); ++i)
        out.push_back(assemble_curv_op(curvature_at(*spec, grid.node(i).point)).spectrum);
    return out;
}

// lambda diam^2, conservatively when the diameter is only an upper bound:
// the true value lies in [lambda D^2, 0] for lambda < 0 and in [0, lambda D^2] otherwise.
double scaled_lower(double lambda, const Diameter& d) {
    const double v = lambda * d.value * d.value;
    return d.kind == DiameterKind::exact ? v : std::min(v, 0.0);
}

}  // namespace

std::vector<MemberSpectrum> spectrum_over_family(const FamilySpec& fam, int sample_points) {
    if (fam.schedule.empty()) throw ConfigurationError("family schedule is empty");
    std::vector<MemberSpectrum> out;
    for (std::size_t i = 0; i < fam.schedule.size(); ++i) {
        MemberSpectrum ms;
        ms.index = static_cast<int>(i + 1);
        ms.param = fam.schedule[i];
        ms.spec = family_member(fam, i);
        if (!ms.spec->diameter)
            throw UnsupportedError(ms.spec->name + ": no diameter metadata; scaled certification refused");
        ms.diameter = *ms.spec->diameter;
        const auto spectra = sample_spectra(ms.spec, sample_points);
        ms.points = spectra.size();
        const std::size_t n = spectra.front().size();
        ms.lambda_min = std::numeric_limits<double>::infinity();
        ms.lambda_max = -std::numeric_limits<double>::infinity();
        ms.partial_sums.assign(n, std::numeric_limits<double>::infinity());
        for (const auto& sp : spectra) {
            ms.lambda_min = std::min(ms.lambda_min, sp.front());
            ms.lambda_max = std::max(ms.lambda_max, sp.back());
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                s += sp[c];
                ms.partial_sums[c] = std::min(ms.partial_sums[c], s);
            }
        }
        if (ms.spec->is_homogeneous()) ms.spectrum = spectra.front();
        out.push_back(std::move(ms));
    }
    return out;
}

AncoReport certify_condition(const FamilySpec& fam) {
    const auto members = spectrum_over_family(fam, fam.sample_points);
    AncoReport rep;
    rep.condition = fam.condition;
    rep.base = fam.base;
    rep.worst_slack = std::numeric_limits<double>::infinity();
    bool sampled = false;
    std::size_t max_points = 0;

    for (const auto& ms : members) {
        const int m = ms.spec->dimension();
        const double i = ms.index;
        MemberRecord r;
        r.index = ms.index;
        r.param = ms.param;
        r.points = ms.points;
        r.lambda_min = ms.lambda_min;
        r.lambda_max = ms.lambda_max;
        r.partial_sums = ms.partial_sums;
        r.diameter = ms.diameter.value;
        r.diameter_kind = ms.diameter.kind;
        if (!ms.spec->is_homogeneous()) {
            sampled = true;
            max_points = std::max(max_points, ms.points);
        }

        switch (fam.condition) {
            case Condition::anco_all:
                r.scaled_quantity = scaled_lower(ms.lambda_min, ms.diameter);
                r.threshold = -1.0 / i;
                r.slack = r.scaled_quantity - r.threshold;
                break;
            case Condition::sum_n: {
                int count = 0;
                if (fam.count) count = *fam.count;
                else if (m % 2 == 0) count = m / 2;
                else throw UnsupportedError(ms.spec->name + ": sum_n needs even dimension or an explicit count");
                if (count < 1 || count > static_cast<int>(ms.partial_sums.size()))
                    throw ConfigurationError("sum_n count out of range");
                r.scaled_quantity = scaled_lower(ms.partial_sums[static_cast<std::size_t>(count - 1)], ms.diameter);
                r.threshold = -count / i;
                r.slack = r.scaled_quantity - r.threshold;
                break;
            }
            case Condition::two_sided: {
                if (ms.diameter.kind != DiameterKind::exact)
                    throw UnsupportedError(ms.spec->name +
                                           ": upper-side bound needs an exact diameter; only an upper bound is stored");
                if (!fam.epsilon.empty() && fam.epsilon.size() != fam.schedule.size())
                    throw ConfigurationError("two_sided epsilon list must match the schedule length");
                const double eps = fam.epsilon.empty() ? 1.0 / i : fam.epsilon[static_cast<std::size_t>(ms.index - 1)];
                const double d2 = ms.diameter.value * ms.diameter.value;
                r.scaled_quantity = ms.lambda_min * d2;
                r.threshold = -eps;
                r.scaled_upper = ms.lambda_max * d2;
                r.slack = std::min(r.scaled_quantity - r.threshold, fam.lambda_upper - *r.scaled_upper);
                break;
            }
        }
        r.pass = r.slack >= -1e-10;
        rep.worst_slack = std::min(rep.worst_slack, r.slack);
        rep.members.push_back(std::move(r));
    }

    rep.all_pass = std::all_of(rep.members.begin(), rep.members.end(), [](const auto& r) { return r.pass; });
    for (std::size_t k = rep.members.size(); k-- > 0;) {
        if (!rep.members[k].pass) break;
        rep.first_certified_index = rep.members[k].index;
    }
    if (sampled)
        rep.sampling_caveat = "worst case over sampled points (up to " + std::to_string(max_points) +
                              " per member); not a rigorous bound";

    // Compare the topological conclusion a certified tail implies against the stored metadata.
    const ManifoldPtr& last = members.back().spec;
    rep.chi_metadata = last->euler_char;
    if (rep.first_certified_index) {
        const int m = last->dimension();
        const bool implies_sum = fam.condition != Condition::two_sided;
        if (fam.condition == Condition::two_sided) {
            rep.expected_conclusion = "chi >= 0 (two-sided bound with lower threshold tending to 0)";
            if (rep.chi_metadata) rep.metadata_consistent = *rep.chi_metadata >= 0;
        } else if (m % 2 == 1) {
            rep.expected_conclusion = "chi = 0 (odd dimension)";
            if (rep.chi_metadata) rep.metadata_consistent = *rep.chi_metadata == 0;
        } else if (implies_sum && last->infinite_fundamental_group && *last->infinite_fundamental_group) {
            rep.expected_conclusion = "chi = 0 (scaled half-sum bound with infinite fundamental group, user-asserted)";
            if (rep.chi_metadata) rep.metadata_consistent = *rep.chi_metadata == 0;
        }
    }
    return rep;
}

double scale_invariance_check(const ManifoldPtr& spec, double c, int sample_points) {
    if (!(c > 0.0)) throw DomainError("scale factor must be positive");
    if (!spec->diameter || spec->diameter->kind != DiameterKind::exact)
        throw UnsupportedError(spec->name + ": scale invariance check needs an exact diameter");
    const ManifoldPtr scaled = make_scaled(spec, c);
    const double d0 = spec->diameter->value, d1 = scaled->diameter->value;
    const auto base = sample_spectra(spec, sample_points);
    const auto other = sample_spectra(scaled, sample_points);
    double worst = 0.0;
    // relative to the scaled operator norm, so zero eigenvalues compare sanely
    for (std::size_t p = 0; p < base.size(); ++p) {
        double norm = 0.0;
        for (double x : base[p]) norm = std::max(norm, std::abs(x) * d0 * d0);
        for (std::size_t k = 0; k < base[p].size(); ++k) {
            const double a = base[p][k] * d0 * d0;
            const double b = other[p][k] * d1 * d1;
            worst = std::max(worst, std::abs(b - a) / std::max(norm, 1e-300));
        }
    }
    return worst;
}

std::vector<KappaRecord> kappa_sequence(const FamilySpec& fam) {
    const auto members = spectrum_over_family(fam, fam.sample_points);
    std::vector<KappaRecord> out;
    for (const auto& ms : members) {
        const int m = ms.spec->dimension();
        if (m % 2 != 0) throw DomainError(ms.spec->name + ": kappa sequence needs even dimension");
        const int n = m / 2;
        const double i = ms.index;
        KappaRecord r;
        r.index = ms.index;
        // rescaling to diameter 1 multiplies eigenvalues by diam^2
        r.kappa = scaled_lower(ms.partial_sums[static_cast<std::size_t>(n - 1)], ms.diameter) / n;
        r.threshold = -1.0 / i;
        r.weitzenbock_bound = -weitzenbock_constant(n) / i;
        r.certified = r.kappa * n >= -n / i - 1e-10;
        if (r.certified && r.kappa < r.threshold - 1e-10)
            throw ConsistencyError("kappa below -1/i on a certified member");
        double worst = 0.0;
        for (int k = 1; k <= 2 * n; ++k) worst = std::min(worst, std::min(0.0, r.kappa) * k * (2 * n - k));
        r.bound_holds = !r.certified || worst >= r.weitzenbock_bound - 1e-10;
        out.push_back(r);
    }
    return out;
}

}  // namespace curvlab
