#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "canyon/common.hpp"
#include "canyon/config.hpp"
#include "canyon/criticality.hpp"
#include "doctest.h"

using namespace canyon;

TEST_CASE("survival estimates at the three regimes") {
    SUBCASE("zero horizon trivially reports full survival") {
        const SurvivalEstimate e = estimate_survival(0.5, 0, 100, 42);
        CHECK(e.surviving_fraction == 1.0);
        CHECK(e.survivors == 100);
    }
    SUBCASE("well below critical nothing survives a long horizon") {
        const SurvivalEstimate e = estimate_survival(0.3, 10000, 300, 42);
        CHECK(e.survivors == 0);
        CHECK(e.ci.lo == 0.0);
        CHECK(e.ci.hi < 0.02);
    }
    SUBCASE("well above critical a solid fraction survives") {
        const SurvivalEstimate e = estimate_survival(0.8, 2000, 300, 42);
        CHECK(e.surviving_fraction > 0.35);
        CHECK(e.surviving_fraction < 0.55);
        CHECK(e.ci.lo > 0.3);
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(estimate_survival(1.0, 10, 10, 42), std::invalid_argument);
        CHECK_THROWS_AS(estimate_survival(0.5, 10, 0, 42), std::invalid_argument);
    }
}

TEST_CASE("shared-seed survival counts are exactly monotone in the cutoff") {
    // One seed couples all cutoffs pathwise: the chain watched at a lower
    // cutoff is the higher-cutoff chain intersected with the smaller window,
    // so every replica that survives at q1 survives at q2 > q1.
    const std::vector<double> qs{0.3, 0.55, 0.6, 0.65, 0.8};
    std::uint64_t prev = 0;
    for (double q : qs) {
        const SurvivalEstimate e = estimate_survival(q, 3000, 400, 11);
        CHECK(e.survivors >= prev);
        prev = e.survivors;
    }
    CHECK(prev > 0);  // the top cutoff really survives
}

TEST_CASE("critical point bisection") {
    SUBCASE("a degenerate bracket returns its midpoint untested") {
        const CriticalPointEstimate c = estimate_critical_point(0.631, 0.633, 20, 100, 10, 42);
        CHECK(c.estimate == doctest::Approx(0.632).epsilon(1e-12));
        CHECK(c.probes_used == 0);
    }
    SUBCASE("the default bracket converges near 1 - 1/e at reduced scale") {
        std::vector<ProbeRecord> log;
        const CriticalPointEstimate c =
            estimate_critical_point(0.5, 0.75, 20, 20000, 5000, 42, 0.03, 1, &log);
        CHECK(c.estimate > 0.60);
        CHECK(c.estimate < 0.66);
        CHECK(c.hi - c.lo <= 0.03 + 1e-12);
        CHECK(c.lo < c.estimate);
        CHECK(c.estimate < c.hi);
        CHECK(c.probes_used >= 2);
        REQUIRE(log.size() >= 3);
        CHECK(log[0].q == 0.5);
        CHECK(std::string(log[0].verdict) == "recurrent");
        CHECK(log[1].q == 0.75);
        CHECK(std::string(log[1].verdict) == "transient");
        for (const auto& p : log) {
            const std::string v = p.verdict;
            CHECK((v == "recurrent" || v == "transient" || v == "indeterminate"));
        }
    }
    SUBCASE("brackets that do not straddle the transition are refused") {
        CHECK_THROWS_AS(estimate_critical_point(0.70, 0.78, 10, 5000, 800, 42, 0.01),
                        StatGuardError);
        CHECK_THROWS_AS(estimate_critical_point(0.20, 0.40, 10, 5000, 800, 42, 0.01),
                        StatGuardError);
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(estimate_critical_point(0.7, 0.6, 10, 100, 10, 42),
                        std::invalid_argument);
        CHECK_THROWS_AS(estimate_critical_point(0.5, 1.0, 10, 100, 10, 42),
                        std::invalid_argument);
        CHECK_THROWS_AS(estimate_critical_point(0.5, 0.75, 10, 100, 10, 42, 0.0),
                        std::invalid_argument);
    }
}

TEST_CASE("tail exponent fit recognizes the three shapes") {
    SUBCASE("at the critical cutoff the decay fits a power law near 1/2") {
        std::vector<std::uint64_t> grid;
        for (std::uint64_t k = 64; k <= 4096; k *= 2) grid.push_back(k);
        const TailFit f = estimate_tail_exponent(kCriticalQ, grid, 30000, 42);
        CHECK(f.flag == TailFitFlag::Ok);
        CHECK(f.exponent > 0.35);
        CHECK(f.exponent < 0.60);
        CHECK(f.std_error > 0.0);
        CHECK(f.fit_quality > 0.99);
        // the smallest decade was discarded
        CHECK(f.k_lo == 1024);
        CHECK(f.k_hi == 4096);
        REQUIRE(f.k_used.size() == 3);
        CHECK(f.survival_used[0] > f.survival_used[1]);
        CHECK(f.survival_used[1] > f.survival_used[2]);
    }
    SUBCASE("subcritical decay is flagged as not a power law") {
        const TailFit f = estimate_tail_exponent(0.3, {2, 3, 4, 6, 8, 12, 16}, 100000, 42);
        CHECK(f.flag == TailFitFlag::NonPowerLaw);
        CHECK(f.fit_quality < 0.98);
        CHECK(f.exponent > 1.0);  // local slope far steeper than 1/2
    }
    SUBCASE("a transient plateau is flagged degenerate") {
        std::vector<std::uint64_t> grid;
        for (std::uint64_t k = 64; k <= 4096; k *= 2) grid.push_back(k);
        const TailFit f = estimate_tail_exponent(0.8, grid, 5000, 42);
        CHECK(f.flag == TailFitFlag::Degenerate);
        REQUIRE(f.survival_used.size() >= 2);
        CHECK(f.survival_used.back() > 0.8 * f.survival_used.front());
    }
    SUBCASE("flag names are stable strings") {
        CHECK(std::string(tail_fit_flag_name(TailFitFlag::Ok)) == "ok");
        CHECK(std::string(tail_fit_flag_name(TailFitFlag::NonPowerLaw)) == "non-power-law");
        CHECK(std::string(tail_fit_flag_name(TailFitFlag::Degenerate)) == "degenerate");
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(estimate_tail_exponent(0.5, {8, 16}, 1000, 42), std::invalid_argument);
        CHECK_THROWS_AS(estimate_tail_exponent(0.5, {16, 8, 32}, 1000, 42),
                        std::invalid_argument);
        CHECK_THROWS_AS(estimate_tail_exponent(0.5, {8, 16, 32}, 50, 42), std::invalid_argument);
    }
}

TEST_CASE("growth bound evaluations") {
    CHECK(growth_bound(2.0) == doctest::Approx(0.232544).epsilon(1e-5));
    CHECK(growth_bound(50.0) == doctest::Approx(0.36787944).epsilon(1e-5));
    const double near_one = growth_bound(1.0001);
    CHECK(near_one > 0.0);
    CHECK(near_one < 1e-4);
    CHECK_THROWS_AS(growth_bound(1.0), std::domain_error);
    CHECK_THROWS_AS(growth_bound(0.5), std::domain_error);
}

TEST_CASE("empirical growth clears the bound at moderate scale") {
    const double rate = empirical_growth_rate(2.0, 200000, 42);
    CHECK(rate > growth_bound(2.0) - 0.03);
    CHECK(rate < growth_bound(2.0) + 0.02);
    CHECK_THROWS_AS(empirical_growth_rate(0.0, 100, 42), std::invalid_argument);
    CHECK_THROWS_AS(empirical_growth_rate(2.0, 0, 42), std::invalid_argument);
}

TEST_CASE("running max of the minimum concentrates at the critical point") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const double v = running_max_min(seed, 2000000, 100000);
        CHECK(v > 0.62);
        CHECK(v < 0.645);
    }
}

TEST_CASE("running max grows with the window and validates its bounds") {
    const double shorter = running_max_min(1, 50000, 1000);
    const double longer = running_max_min(1, 200000, 1000);
    CHECK(longer >= shorter);
    CHECK_THROWS_AS(running_max_min(1, 100, 0), std::invalid_argument);
    CHECK_THROWS_AS(running_max_min(1, 100, 100), std::invalid_argument);
}
