#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "canyon/common.hpp"

namespace canyon {

using Rational = boost::multiprecision::cpp_rational;

// Polynomial in the cutoff q with exact rational coefficients;
// coeffs[i] multiplies q^i. Trailing zero coefficients are trimmed.
struct ProbPoly {
    std::vector<Rational> coeffs;

    Rational eval_exact(const Rational& q) const;

    // Exact rational evaluation, rounded to double only at the end.
    // pre: 0 <= q <= 1.
    double eval(double q) const;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    void trim();

    bool operator==(const ProbPoly& other) const { return coeffs == other.coeffs; }
};

ProbPoly poly_add(const ProbPoly& a, const ProbPoly& b);
ProbPoly poly_scale(const ProbPoly& a, const Rational& c);

// Exact return-time distribution of the restricted chain started empty:
// element k-1 is P[tau = k] as a polynomial in q, for k = 1..kmax.
//
// Method: condition on which steps carry an inside arrival (factor q each;
// outside steps contribute 1-q) and on the relative order of the inside
// positions. Inside positions are i.i.d. uniform, so (a) the j-th inside
// arrival ranks uniformly among the j seen so far, each rank carrying weight
// 1/j, and (b) the future depends on the survivors only through their ranks
// among all inside arrivals so far. The walk over (inside count, survivor
// rank set) therefore carries exact rational weights, and paths reaching the
// empty set for the first time at step k contribute weight * q^m (1-q)^{k-m}
// with m inside arrivals. States reaching identical rank sets are merged.
//
// pre: 1 <= kmax <= 11 (the unmerged path count grows like e * kmax!).
std::vector<ProbPoly> exact_return_pmf(int kmax);

// Exact P[tau > kmax] as a polynomial in q (the alive mass after kmax
// steps). Satisfies sum_k pmf_k + tail = 1 identically.
ProbPoly exact_return_tail(int kmax);

// Reference implementation with no state merging: walks every
// (pattern, rank choice) path separately. Exponential in kmax; only for
// cross-checking small kmax.
std::vector<ProbPoly> exact_return_pmf_nomemo(int kmax);

// Sum over k <= kmax of k * pmf_k, as an exact polynomial.
ProbPoly truncated_mean_poly(int kmax);

struct TruncatedMeanCheck {
    double lower;        // sum of k * pmf_k(q), k <= kmax; a lower bound on the mean
    double tail_mass;    // P[tau > kmax](q)
    double diagnostic;   // lower + (kmax+1) * tail_mass
    double closed_form;  // 1/(1+ln(1-q))
};

// pre: q below the critical cutoff. Verifies lower <= closed_form.
TruncatedMeanCheck truncated_mean_check(int kmax, double q);

// One polynomial as {"k": k, "coeffs": [["num","den"], ...]} with
// decimal-string big integers, ascending powers of q.
std::string poly_to_json(const ProbPoly& poly, int k);

// The full pmf list as a JSON array of the objects above.
std::string pmf_list_to_json(const std::vector<ProbPoly>& polys);

}  // namespace canyon
