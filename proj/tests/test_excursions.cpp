#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "canyon/common.hpp"
#include "canyon/delta.hpp"
#include "canyon/excursions.hpp"
#include "canyon/oracle.hpp"
#include "canyon/runner.hpp"
#include "canyon/step.hpp"
#include "doctest.h"

using namespace canyon;

TEST_CASE("closed-form mean return time") {
    CHECK(closed_form_mean_return(0.0) == 1.0);
    CHECK(closed_form_mean_return(0.5) == doctest::Approx(3.258891353270929).epsilon(1e-12));
    CHECK(closed_form_mean_return(0.3) == doctest::Approx(1.554424144650079).epsilon(1e-12));
    CHECK(std::isinf(closed_form_mean_return(kCriticalQ)));
    CHECK(std::isinf(closed_form_mean_return(0.8)));
    CHECK_THROWS_AS(closed_form_mean_return(1.0), std::invalid_argument);
    CHECK_THROWS_AS(closed_form_mean_return(-0.1), std::invalid_argument);
}

TEST_CASE("q=0 excursions return immediately") {
    RngStream rng(3, 0);
    for (int i = 0; i < 100; ++i) {
        const ExcursionSample s = sample_return_time(rng, 0.0, 1000);
        CHECK(s.length == 1);
        CHECK(s.peak_size == 0);
        CHECK_FALSE(s.censored);
    }
}

TEST_CASE("peak size is zero exactly for length-1 excursions") {
    RngStream rng(11, 0);
    for (int i = 0; i < 1000; ++i) {
        const ExcursionSample s = sample_return_time(rng, 0.5, 100000);
        REQUIRE_FALSE(s.censored);
        REQUIRE((s.peak_size == 0) == (s.length == 1));
    }
}

TEST_CASE("excursion scratch reuse replays identically to the fresh path") {
    RngStream a(21, 5), b(21, 5);
    RestrictedConfig scratch(0.55);
    for (int i = 0; i < 200; ++i) {
        const ExcursionSample x = run_excursion(a, scratch, 10000);
        const ExcursionSample y = sample_return_time(b, 0.55, 10000);
        REQUIRE(x.length == y.length);
        REQUIRE(x.peak_size == y.peak_size);
        REQUIRE(x.censored == y.censored);
    }
}

TEST_CASE("mean return estimate agrees with the closed form") {
    SUBCASE("q=0 is exact") {
        const MeanReturnEstimate e = estimate_mean_return(0.0, 1000, 42);
        CHECK(e.estimate.mean == 1.0);
        CHECK(e.estimate.std_error == 0.0);
        CHECK(e.censored == 0);
        CHECK(e.closed_form == 1.0);
    }
    SUBCASE("q=0.5 matches within sampling error") {
        const MeanReturnEstimate e = estimate_mean_return(0.5, 20000, 42);
        CHECK(e.censored == 0);
        CHECK(std::abs(e.estimate.mean - e.closed_form) < 4.0 * e.estimate.std_error);
        CHECK(std::abs(e.estimate.mean - 3.2588907) < 0.2);
        CHECK(e.estimate.n == 20000);
    }
    SUBCASE("n below 2 is rejected") {
        CHECK_THROWS_AS(estimate_mean_return(0.5, 1, 42), std::invalid_argument);
    }
    SUBCASE("a tight horizon censors and flags") {
        const MeanReturnEstimate e = estimate_mean_return(0.62, 1000, 42, 3);
        CHECK(e.censored > 0);
        CHECK(e.estimate.mean <= 3.0);  // censored lengths enter at the horizon
    }
    SUBCASE("above the critical cutoff the closed form is infinite") {
        const MeanReturnEstimate e = estimate_mean_return(0.7, 500, 42, 200);
        CHECK(std::isinf(e.closed_form));
        CHECK(e.censored > 0);
    }
}

TEST_CASE("return-time histogram matches the exact polynomials at q=0.3") {
    const double q = 0.3;
    const std::uint64_t n = 200000;
    const ReturnTimeHistogram h = sample_return_histogram(q, n, 6, 42);
    REQUIRE(h.counts.size() == 7);
    REQUIRE(h.n == n);
    const auto pmf = exact_return_pmf(6);
    std::uint64_t total = h.overflow;
    for (int k = 1; k <= 6; ++k) {
        const double p = pmf[static_cast<std::size_t>(k) - 1].eval(q);
        const double freq = static_cast<double>(h.counts[static_cast<std::size_t>(k)]) / n;
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
        REQUIRE(std::abs(freq - p) < 5.0 * sigma + 1e-12);
        total += h.counts[static_cast<std::size_t>(k)];
    }
    CHECK(total == n);
    const double tail = exact_return_tail(6).eval(q);
    const double tail_freq = static_cast<double>(h.overflow) / n;
    CHECK(std::abs(tail_freq - tail) <
          5.0 * std::sqrt(tail * (1.0 - tail) / static_cast<double>(n)) + 1e-12);
}

TEST_CASE("delta symbol classification") {
    CHECK(classify_delta(0, 0) == DeltaSymbol::Under0);
    CHECK(classify_delta(3, 3) == DeltaSymbol::Over0);
    CHECK(classify_delta(3, 2) == DeltaSymbol::Minus1);
    CHECK(classify_delta(3, 4) == DeltaSymbol::Plus1);
    CHECK(classify_delta(0, 1) == DeltaSymbol::Plus1);
    CHECK(classify_delta(1, 0) == DeltaSymbol::Minus1);
    CHECK_THROWS_AS(classify_delta(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(classify_delta(5, 3), std::invalid_argument);
}

TEST_CASE("closed-form delta densities") {
    SUBCASE("t=0 concentrates on the empty symbol") {
        const DeltaDensities d = closed_form_delta_densities(0.0);
        CHECK(d.p_under0 == 1.0);
        CHECK(d.p_over0 == 0.0);
        CHECK(d.p_minus1 == 0.0);
        CHECK(d.p_plus1 == 0.0);
    }
    SUBCASE("t=0.5 hits the known values") {
        const DeltaDensities d = closed_form_delta_densities(0.5);
        CHECK(d.p_under0 == doctest::Approx(0.303265).epsilon(1e-5));
        CHECK(d.p_over0 == doctest::Approx(0.090204).epsilon(1e-4));
        CHECK(d.p_minus1 == doctest::Approx(0.303265).epsilon(1e-5));
        CHECK(d.p_plus1 == doctest::Approx(0.303265).epsilon(1e-5));
    }
    SUBCASE("components always sum to one") {
        for (double t : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999}) {
            const DeltaDensities d = closed_form_delta_densities(t);
            CHECK(std::abs(d.p_under0 + d.p_over0 + d.p_minus1 + d.p_plus1 - 1.0) < 1e-9);
        }
    }
    SUBCASE("the empty symbol vanishes as t approaches 1") {
        CHECK(closed_form_delta_densities(0.99).p_under0 < 0.01);
    }
    SUBCASE("t at or above 1 is rejected") {
        CHECK_THROWS_AS(closed_form_delta_densities(1.0), std::domain_error);
        CHECK_THROWS_AS(closed_form_delta_densities(1.5), std::domain_error);
    }
}

TEST_CASE("estimated delta densities converge to the closed form") {
    const std::vector<double> t_grid{0.2, 0.5, 0.8};
    const auto est = estimate_delta_densities(t_grid, 400000, 40000, 42);
    REQUIRE(est.size() == 3);
    for (std::size_t i = 0; i < est.size(); ++i) {
        const DeltaDensities cf = closed_form_delta_densities(t_grid[i]);
        CHECK(est[i].t == t_grid[i]);
        CHECK(std::abs(est[i].freq.p_under0 - cf.p_under0) < 0.02);
        CHECK(std::abs(est[i].freq.p_over0 - cf.p_over0) < 0.02);
        CHECK(std::abs(est[i].freq.p_minus1 - cf.p_minus1) < 0.02);
        CHECK(std::abs(est[i].freq.p_plus1 - cf.p_plus1) < 0.02);
        CHECK(std::abs(est[i].freq.p_plus1 - est[i].freq.p_minus1) < 0.01);
        const double sum = est[i].freq.p_under0 + est[i].freq.p_over0 + est[i].freq.p_minus1 +
                           est[i].freq.p_plus1;
        CHECK(std::abs(sum - 1.0) < 1e-12);
        CHECK(est[i].std_error.p_under0 > 0.0);
        CHECK(est[i].std_error.p_under0 < 0.01);
    }
}

TEST_CASE("delta density estimator validates its grid") {
    CHECK_THROWS_AS(estimate_delta_densities({0.5, 1.0}, 100, 0, 42), std::invalid_argument);
    CHECK_THROWS_AS(estimate_delta_densities({0.5, 0.2}, 100, 0, 42), std::invalid_argument);
    CHECK_THROWS_AS(estimate_delta_densities({}, 100, 0, 42), std::invalid_argument);
}

TEST_CASE("symbol bookkeeping reproduces the running count") {
    const double thr = from_exp(0.5);
    RunOptions opt;
    opt.seed = 13;
    opt.steps = 3000;
    opt.thresholds = {thr};
    std::int64_t prev = 0, plus = 0, minus = 0, final_count = 0;
    run(opt, [&](const StepRecord& r) {
        const std::int64_t now = r.threshold_counts[0];
        switch (classify_delta(prev, now)) {
            case DeltaSymbol::Plus1:
                plus += 1;
                break;
            case DeltaSymbol::Minus1:
                minus += 1;
                break;
            default:
                break;
        }
        prev = now;
        final_count = now;
    });
    CHECK(plus - minus == final_count);
    CHECK(plus > 0);
}

TEST_CASE("regeneration sampling emits exactly the excursion's states") {
    const double q = 0.4;
    const std::uint64_t cycles = 200;
    std::vector<std::uint64_t> emitted(cycles, 0);
    std::vector<std::uint64_t> empties(cycles, 0);
    sample_stationary_states(q, cycles, 42, 100000,
                             [&](std::uint64_t c, const StationaryVisit& v) {
                                 emitted[c] += 1;
                                 if (v.size == 0) {
                                     empties[c] += 1;
                                     CHECK(v.min_or_cutoff == q);
                                 } else {
                                     CHECK(v.min_or_cutoff < q);
                                 }
                             });
    for (std::uint64_t c = 0; c < cycles; ++c) {
        RngStream rng(42, c);
        const ExcursionSample s = sample_return_time(rng, q, 100000);
        REQUIRE(emitted[c] == s.length);
        REQUIRE(empties[c] == 1);  // exactly the final state of each cycle
    }
}

TEST_CASE("regeneration sampling at q=0 emits only empty states") {
    std::uint64_t n = 0;
    sample_stationary_states(0.0, 50, 7, 1000, [&](std::uint64_t, const StationaryVisit& v) {
        n += 1;
        CHECK(v.size == 0);
    });
    CHECK(n == 50);
}

TEST_CASE("a censored cycle aborts stationary sampling") {
    CHECK_THROWS_AS(
        sample_stationary_states(0.5, 1000, 42, 2, [](std::uint64_t, const StationaryVisit&) {}),
        StatGuardError);
}

TEST_CASE("stationary pass verifies the minimum's uniform law") {
    SUBCASE("q=0 is the degenerate atom") {
        const StationarySummary s = stationary_pass(0.0, 1000, 42);
        CHECK(s.max_cdf_deviation == 0.0);
        CHECK(s.empty_fraction == 1.0);
        CHECK(s.states >= 1000);
        CHECK(s.mean_states_per_cycle == 1.0);
    }
    SUBCASE("t=0.5 cutoff at moderate scale") {
        MinLawGrid grid;
        const double q = from_exp(0.5);
        const StationarySummary s = stationary_pass(q, 300000, 42, 100000000ULL, &grid);
        CHECK(s.states >= 300000);
        CHECK(s.empty_states == s.cycles);  // one empty state per cycle, exactly
        CHECK(std::abs(s.empty_fraction - 0.5) < 0.02);
        CHECK(std::abs(s.mean_states_per_cycle - 2.0) < 0.1);
        CHECK(s.max_cdf_deviation < 0.03);

        REQUIRE(grid.s.size() == 100);
        REQUIRE(grid.empirical.size() == 100);
        REQUIRE(grid.target.size() == 100);
        CHECK(grid.t_plus == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(grid.empirical[0] == 1.0);
        for (std::size_t i = 0; i < grid.s.size(); ++i) {
            CHECK(grid.target[i] == doctest::Approx(1.0 - grid.s[i]).epsilon(1e-12));
            CHECK(std::abs(grid.empirical[i] - grid.target[i]) <= s.max_cdf_deviation + 1e-12);
        }
        // the halfway grid point pins P[minimum > 0.25] = 0.75
        CHECK(grid.s[50] == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(std::abs(grid.empirical[50] - 0.75) < 0.02);
    }
    SUBCASE("the wrapper returns the same deviation") {
        const double q = 0.3;
        MinLawGrid grid;
        const StationarySummary s = stationary_pass(q, 50000, 9, 100000000ULL, &grid);
        CHECK(stationary_min_uniformity(q, 50000, 9) == s.max_cdf_deviation);
    }
    SUBCASE("cutoffs at or above critical are rejected") {
        CHECK_THROWS_AS(stationary_pass(kCriticalQ, 100, 42), std::invalid_argument);
        CHECK_THROWS_AS(stationary_min_uniformity(0.9, 100, 42), std::invalid_argument);
    }
}
