#include <cmath>
#include <stdexcept>
#include <vector>

#include "canyon/config.hpp"
#include "canyon/oracle.hpp"
#include "canyon/step.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace canyon;

namespace {

ProbPoly make_poly(std::vector<Rational> coeffs) {
    ProbPoly p{std::move(coeffs)};
    p.trim();
    return p;
}

// p * (1-q)
ProbPoly times_one_minus_q(const ProbPoly& p) {
    ProbPoly out;
    out.coeffs.assign(p.coeffs.size() + 1, Rational(0));
    for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
        out.coeffs[i] += p.coeffs[i];
        out.coeffs[i + 1] -= p.coeffs[i];
    }
    out.trim();
    return out;
}

// weight * q^m * (1-q)^o as a polynomial
ProbPoly monomial_weight(const Rational& weight, int m, int o) {
    ProbPoly p;
    p.coeffs.assign(static_cast<std::size_t>(m) + 1, Rational(0));
    p.coeffs[static_cast<std::size_t>(m)] = weight;
    for (int i = 0; i < o; ++i) p = times_one_minus_q(p);
    return p;
}

// Independent re-derivation of the return-time pmf driven through the
// engine itself: enumerate every inside/outside pattern and every relative
// rank of each inside arrival, realize the ranks as concrete positions, and
// replay them with step_restricted. The j-th inside arrival takes each rank
// with probability 1/j; a path of length k with m inside arrivals carries
// the pattern weight q^m (1-q)^(k-m).
struct ReplayEnumerator {
    int kmax;
    double cutoff = 0.7;
    std::vector<ProbPoly> pmf;  // pmf[k-1] accumulates P[tau = k]

    explicit ReplayEnumerator(int kmax_arg) : kmax(kmax_arg) {
        pmf.assign(static_cast<std::size_t>(kmax), ProbPoly{});
        std::vector<double> inside;
        RestrictedConfig cfg(cutoff);
        walk(cfg, inside, 1, Rational(1), 0);
    }

    void walk(RestrictedConfig& cfg, std::vector<double>& inside, int k,
              const Rational& rank_weight, int m) {
        // outside branch
        {
            RestrictedConfig next = cfg;
            step_restricted(next, RestrictedArrival::outside());
            descend(next, inside, k, rank_weight, m, k - m);
        }
        // inside branch: one subtree per rank among the m+1 arrivals so far
        const int j = m + 1;
        for (int r = 1; r <= j; ++r) {
            const double lo = r == 1 ? 0.0 : inside[static_cast<std::size_t>(r) - 2];
            const double hi = r == j ? cutoff : inside[static_cast<std::size_t>(r) - 1];
            const double pos = 0.5 * (lo + hi);
            RestrictedConfig next = cfg;
            step_restricted(next, RestrictedArrival::inside(pos));
            inside.insert(inside.begin() + (r - 1), pos);
            descend(next, inside, k, rank_weight / j, m + 1, k - m - 1);
            inside.erase(inside.begin() + (r - 1));
        }
    }

    void descend(RestrictedConfig& next, std::vector<double>& inside, int k,
                 const Rational& rank_weight, int m, int o) {
        if (next.empty()) {
            pmf[static_cast<std::size_t>(k) - 1] =
                poly_add(pmf[static_cast<std::size_t>(k) - 1], monomial_weight(rank_weight, m, o));
            return;
        }
        if (k == kmax) return;
        walk(next, inside, k + 1, rank_weight, m);
    }
};

}  // namespace

TEST_CASE("return-time polynomials match the hand-derived identities for k <= 4") {
    const auto pmf = exact_return_pmf(4);
    REQUIRE(pmf.size() == 4);
    // 1-q
    CHECK(pmf[0] == make_poly({Rational(1), Rational(-1)}));
    // q(1-q)
    CHECK(pmf[1] == make_poly({Rational(0), Rational(1), Rational(-1)}));
    // q^2(1-q)/2
    CHECK(pmf[2] == make_poly({Rational(0), Rational(0), Rational(1, 2), Rational(-1, 2)}));
    // q^3(1-q)/6 + q^2(1-q)^2/2
    CHECK(pmf[3] == make_poly({Rational(0), Rational(0), Rational(1, 2), Rational(-5, 6),
                               Rational(1, 3)}));
    // same identities through the factored forms at a rational point
    const Rational q(1, 3);
    CHECK(pmf[3].eval_exact(q) ==
          q * q * q * (1 - q) / 6 + q * q * (1 - q) * (1 - q) / 2);
}

TEST_CASE("polynomial evaluation matches the known values") {
    const auto pmf = exact_return_pmf(4);
    CHECK(pmf[1].eval(0.5) == doctest::Approx(0.25).epsilon(1e-15));
    // 1/96 + 1/32, from the factored form at q = 1/2
    CHECK(pmf[3].eval(0.5) == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
    CHECK(pmf[0].eval(0.0) == 1.0);
    for (int k = 2; k <= 4; ++k) CHECK(pmf[static_cast<std::size_t>(k) - 1].eval(0.0) == 0.0);
    for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        double total = 0.0;
        for (const auto& p : pmf) {
            const double v = p.eval(q);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            total += v;
        }
        CHECK(total <= 1.0 + 1e-15);
    }
}

TEST_CASE("pmf plus tail is exactly one for every horizon") {
    for (int kmax = 1; kmax <= 8; ++kmax) {
        ProbPoly total = exact_return_tail(kmax);
        for (const auto& p : exact_return_pmf(kmax)) total = poly_add(total, p);
        CHECK(total == make_poly({Rational(1)}));
    }
}

TEST_CASE("merged and unmerged enumerations agree") {
    const int kmax = 7;
    const auto merged = exact_return_pmf(kmax);
    const auto plain = exact_return_pmf_nomemo(kmax);
    REQUIRE(merged.size() == plain.size());
    for (std::size_t i = 0; i < merged.size(); ++i) CHECK(merged[i] == plain[i]);
}

TEST_CASE("engine replay of every pattern reproduces the enumeration exactly") {
    const int kmax = 6;
    const ReplayEnumerator replay(kmax);
    const auto pmf = exact_return_pmf(kmax);
    for (int k = 1; k <= kmax; ++k)
        CHECK(pmf[static_cast<std::size_t>(k) - 1] == replay.pmf[static_cast<std::size_t>(k) - 1]);
}

TEST_CASE("truncated mean expands into the closed form's series") {
    const ProbPoly mean = truncated_mean_poly(6);
    REQUIRE(mean.coeffs.size() >= 4);
    CHECK(mean.coeffs[0] == Rational(1));
    CHECK(mean.coeffs[1] == Rational(1));
    CHECK(mean.coeffs[2] == Rational(3, 2));
    CHECK(mean.coeffs[3] == Rational(7, 3));
}

TEST_CASE("truncated mean check brackets the closed form") {
    SUBCASE("q=0 collapses to the exact mean 1") {
        const TruncatedMeanCheck c = truncated_mean_check(5, 0.0);
        CHECK(c.lower == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(c.tail_mass == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(c.closed_form == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("q=0.1 converges within 1e-3 by kmax=10") {
        const TruncatedMeanCheck c = truncated_mean_check(10, 0.1);
        const double target = 1.0 / (1.0 + std::log(0.9));
        CHECK(target == doctest::Approx(1.117768).epsilon(1e-6));
        CHECK(std::abs(c.lower - target) < 1e-3);
        CHECK(c.lower <= c.closed_form);
    }
    SUBCASE("both reported bounds sit below the exact mean") {
        const TruncatedMeanCheck c = truncated_mean_check(8, 0.3);
        CHECK(c.lower < c.diagnostic);
        CHECK(c.diagnostic < c.closed_form);
    }
    SUBCASE("at and above the critical cutoff the check is refused") {
        CHECK_THROWS_AS(truncated_mean_check(5, kCriticalQ), std::invalid_argument);
        CHECK_THROWS_AS(truncated_mean_check(5, 0.9), std::invalid_argument);
    }
}

TEST_CASE("enumeration horizon limits are enforced") {
    CHECK_THROWS_AS(exact_return_pmf(0), std::invalid_argument);
    CHECK_THROWS_AS(exact_return_pmf(12), std::invalid_argument);
    CHECK_THROWS_AS(exact_return_pmf_nomemo(9), std::invalid_argument);
}

TEST_CASE("polynomials serialize as decimal rational JSON") {
    const auto pmf = exact_return_pmf(4);
    const auto one = nlohmann::json::parse(poly_to_json(pmf[1], 2));
    CHECK(one["k"] == 2);
    const auto expected = nlohmann::json::parse(R"([["0","1"],["1","1"],["-1","1"]])");
    CHECK(one["coeffs"] == expected);

    const auto all = nlohmann::json::parse(pmf_list_to_json(pmf));
    REQUIRE(all.is_array());
    REQUIRE(all.size() == 4);
    CHECK(all[0]["k"] == 1);
    CHECK(all[3]["k"] == 4);
    CHECK(all[3]["coeffs"].size() == 5);
}
