#include <doctest.h>

#include <cmath>
#include <numbers>

#include "curvlab/anco_analysis.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/metric_catalog.hpp"

using namespace curvlab;

namespace {

FamilySpec heisenberg_family(int count) {
    FamilySpec f;
    f.base = "heisenberg_nil[{t}]";
    f.schedule = harmonic_schedule(count);
    f.condition = Condition::anco_all;
    return f;
}

bool is_exact(const ManifoldSpec& s) { return s.diameter && s.diameter->kind == DiameterKind::exact; }

}  // namespace

TEST_CASE("schedules and member substitution") {
    const auto h = harmonic_schedule(4);
    REQUIRE(h.size() == 4);
    CHECK(h[3] == 0.25);
    CHECK(linear_schedule(3) == std::vector<double>{1, 2, 3});

    FamilySpec f;
    f.base = "product:sphere[2,{t}],sphere[2,{t}]";
    f.schedule = {0.5, 2.0};
    CHECK(family_member(f, 1)->name == "product:sphere[2,2],sphere[2,2]");
    CHECK_THROWS_AS(family_member(f, 2), DomainError);
    f.schedule = {-1.0};
    CHECK_THROWS_AS(family_member(f, 0), ConfigurationError);
    f.base = "sphere[2,1]";
    f.schedule = {1.0};
    CHECK_THROWS_AS(family_member(f, 0), ConfigurationError);

    CHECK(parse_condition(to_string(Condition::sum_n)) == Condition::sum_n);
    CHECK_THROWS_AS(parse_condition("anco"), ConfigurationError);
}

TEST_CASE("Heisenberg collapse: closed-form spectrum and certified tail") {
    const AncoReport rep = certify_condition(heisenberg_family(50));
    REQUIRE(rep.members.size() == 50);
    for (const auto& m : rep.members) {
        CAPTURE(m.index);
        const double eps = 1.0 / m.index;
        CHECK(m.lambda_min < 0.0);
        CHECK(std::abs(m.lambda_min - (-0.75 * eps * eps)) <= 1e-10);
        CHECK(std::abs(m.lambda_max - 0.25 * eps * eps) <= 1e-10);
        CHECK(m.points == 1);
        CHECK(m.diameter == 3.5);
        CHECK(m.diameter_kind == DiameterKind::upper_bound);
        // lambda_1 D^2 >= -1/i  iff  i >= 0.75 * 3.5^2 = 9.1875
        CHECK(m.pass == (m.index >= 10));
    }
    REQUIRE(rep.first_certified_index);
    CHECK(*rep.first_certified_index == 10);
    CHECK_FALSE(rep.all_pass);
    CHECK(rep.sampling_caveat.empty());
    CHECK(*rep.chi_metadata == 0);
    CHECK(*rep.metadata_consistent);
    CHECK(rep.expected_conclusion.find("chi = 0") != std::string::npos);
    // lambda_1 -> 0 at rate eps^2
    for (std::size_t k = 1; k < rep.members.size(); ++k) {
        const double ratio = rep.members[k].lambda_min / (rep.members[k].param * rep.members[k].param);
        CHECK(ratio == doctest::Approx(-0.75).epsilon(1e-12));
    }
}

TEST_CASE("certification is conservative in the diameter") {
    FamilySpec base = heisenberg_family(30);
    const AncoReport loose = certify_condition(base);
    for (double factor : {0.5, 0.9}) {
        CAPTURE(factor);
        FamilySpec f = base;
        f.diameter_factor = factor;
        const AncoReport tight = certify_condition(f);
        REQUIRE(tight.members.size() == loose.members.size());
        for (std::size_t k = 0; k < loose.members.size(); ++k) {
            CHECK(tight.members[k].diameter_kind == DiameterKind::exact);
            if (loose.members[k].pass) CHECK(tight.members[k].pass);
            CHECK(tight.members[k].slack >= loose.members[k].slack - 1e-15);
        }
        REQUIRE(tight.first_certified_index);
        CHECK(*tight.first_certified_index <= *loose.first_certified_index);
    }
    FamilySpec f = base;
    f.diameter_factor = 0.5;
    // 0.75 * 1.75^2 = 2.296875, so i >= 3
    CHECK(*certify_condition(f).first_certified_index == 3);
}

TEST_CASE("upper-bound diameters use the conservative scaled value") {
    FamilySpec f;
    f.base = "berger_sphere[{t}]";
    f.schedule = {0.5, 2.0};
    f.condition = Condition::anco_all;
    const AncoReport rep = certify_condition(f);
    for (const auto& m : rep.members) {
        CHECK(m.diameter_kind == DiameterKind::upper_bound);
        CHECK(m.scaled_quantity <= 0.0);
        if (m.lambda_min < 0.0) CHECK(m.scaled_quantity == doctest::Approx(m.lambda_min * m.diameter * m.diameter));
    }
}

TEST_CASE("two_sided on round spheres is consistent with chi >= 0") {
    FamilySpec f;
    f.base = "sphere[2,{t}]";
    f.schedule = linear_schedule(5);
    f.condition = Condition::two_sided;
    f.lambda_upper = 10.0;
    f.sample_points = 16;
    const AncoReport rep = certify_condition(f);
    CHECK(rep.all_pass);
    REQUIRE(rep.first_certified_index);
    CHECK(*rep.first_certified_index == 1);
    for (const auto& m : rep.members) CHECK(*m.scaled_upper == doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(1e-9));
    CHECK(*rep.metadata_consistent);
    CHECK(*rep.chi_metadata == 2);
    CHECK_FALSE(rep.sampling_caveat.empty());

    f.lambda_upper = 9.0;
    CHECK_FALSE(certify_condition(f).first_certified_index);

    f.lambda_upper = 10.0;
    f.epsilon = {1.0};
    CHECK_THROWS_AS(certify_condition(f), ConfigurationError);

    FamilySpec h = heisenberg_family(3);
    h.condition = Condition::two_sided;
    h.lambda_upper = 1.0;
    CHECK_THROWS_AS(certify_condition(h), UnsupportedError);
}

TEST_CASE("sum_n on a collapsing product with infinite fundamental group") {
    FamilySpec f;
    f.base = "product:heisenberg_nil[{t}],flat_torus[1]";
    f.schedule = harmonic_schedule(20);
    f.condition = Condition::sum_n;
    const AncoReport rep = certify_condition(f);
    REQUIRE(rep.first_certified_index);
    CHECK(*rep.chi_metadata == 0);
    CHECK(*rep.metadata_consistent);
    CHECK(rep.expected_conclusion.find("infinite fundamental group") != std::string::npos);

    const auto kappa = kappa_sequence(f);
    REQUIRE(kappa.size() == 20);
    for (const auto& k : kappa) {
        CHECK(k.threshold == doctest::Approx(-1.0 / k.index));
        CHECK(k.weitzenbock_bound == doctest::Approx(-4.0 / k.index));
        CHECK(k.bound_holds);
        if (k.index >= *rep.first_certified_index) CHECK(k.certified);
    }

    FamilySpec odd = heisenberg_family(3);
    odd.condition = Condition::sum_n;
    CHECK_THROWS_AS(certify_condition(odd), UnsupportedError);
    CHECK_THROWS_AS(kappa_sequence(odd), DomainError);
    odd.count = 1;
    CHECK(certify_condition(odd).members.size() == 3);
    odd.count = 7;
    CHECK_THROWS_AS(certify_condition(odd), ConfigurationError);
}

TEST_CASE("scale invariance of lambda diam^2 on exact-diameter entries") {
    int checked = 0;
    for (const auto& n : standard_catalog()) {
        const auto s = catalog_get(n);
        if (!is_exact(*s)) {
            CHECK_THROWS_AS(scale_invariance_check(s, 2.0), UnsupportedError);
            continue;
        }
        CAPTURE(n);
        for (double c : {0.5, 2.0, 10.0}) CHECK(scale_invariance_check(s, c, 16) <= 1e-10);
        ++checked;
    }
    CHECK(checked >= 10);
    CHECK_THROWS_AS(scale_invariance_check(catalog_get("sphere[2,1]"), 0.0), DomainError);
}

TEST_CASE("empty schedules are rejected") {
    FamilySpec f = heisenberg_family(1);
    f.schedule.clear();
    CHECK_THROWS_AS(certify_condition(f), ConfigurationError);
}
