#include "canyon/oracle.hpp"

#include <bit>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>

#include "canyon/config.hpp"
#include "canyon/excursions.hpp"

namespace canyon {

using boost::multiprecision::cpp_int;

Rational ProbPoly::eval_exact(const Rational& q) const {
    Rational acc = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * q + coeffs[i];
    return acc;
}

double ProbPoly::eval(double q) const {
    require(q >= 0.0 && q <= 1.0, "evaluation point must lie in [0,1]");
    return static_cast<double>(eval_exact(Rational(q)));
}

void ProbPoly::trim() {
    while (coeffs.size() > 1 && coeffs.back() == 0) coeffs.pop_back();
    if (coeffs.empty()) coeffs.push_back(Rational(0));
}

ProbPoly poly_add(const ProbPoly& a, const ProbPoly& b) {
    ProbPoly out;
    out.coeffs.resize(std::max(a.coeffs.size(), b.coeffs.size()), Rational(0));
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) out.coeffs[i] += a.coeffs[i];
    for (std::size_t i = 0; i < b.coeffs.size(); ++i) out.coeffs[i] += b.coeffs[i];
    out.trim();
    return out;
}

ProbPoly poly_scale(const ProbPoly& a, const Rational& c) {
    ProbPoly out = a;
    for (Rational& r : out.coeffs) r *= c;
    out.trim();
    return out;
}

namespace {

// Rank-set encoding: bit s-1 set means a survivor of rank s among the m
// inside arrivals so far. Rank 1 is the smallest position.

inline int min_rank(std::uint32_t mask) { return std::countr_zero(mask) + 1; }

// Renumber ranks after a new arrival of rank r joins: ranks >= r shift up.
inline std::uint32_t shift_ranks(std::uint32_t mask, int r) {
    const std::uint32_t below = mask & ((1u << (r - 1)) - 1u);
    const std::uint32_t at_or_above = mask ^ below;
    return below | (at_or_above << 1);
}

// Applies one inside arrival of rank r to the (already shifted) survivor
// set: insert below the minimum, or displace the minimum.
inline std::uint32_t apply_inside(std::uint32_t shifted, int r) {
    const std::uint32_t rbit = 1u << (r - 1);
    if (shifted == 0 || r < min_rank(shifted)) return shifted | rbit;
    return (shifted & (shifted - 1)) | rbit;
}

cpp_int binomial(int n, int i) {
    cpp_int b = 1;
    for (int j = 0; j < i; ++j) {
        b *= n - j;
        b /= j + 1;
    }
    return b;
}

// Adds w * q^m * (1-q)^n_out to the polynomial.
void add_monomial(ProbPoly& poly, const Rational& w, int m, int n_out) {
    if (poly.coeffs.size() < static_cast<std::size_t>(m + n_out + 1))
        poly.coeffs.resize(m + n_out + 1, Rational(0));
    for (int i = 0; i <= n_out; ++i) {
        Rational term = w * Rational(binomial(n_out, i));
        if (i % 2 != 0) term = -term;
        poly.coeffs[m + i] += term;
    }
}

struct Enumeration {
    std::vector<ProbPoly> pmf;  // pmf[k-1] = P[tau = k]
    ProbPoly tail;              // P[tau > kmax]
};

void check_kmax(int kmax) {
    require(kmax >= 1, "kmax must be at least 1");
    if (kmax > 11)
        throw std::invalid_argument(
            "kmax too large: the enumeration walks on the order of e * kmax! rank orders; "
            "11 is the supported ceiling");
}

Enumeration enumerate_merged(int kmax) {
    check_kmax(kmax);
    Enumeration out;
    out.pmf.assign(kmax, ProbPoly{});
    for (ProbPoly& p : out.pmf) p.coeffs.assign(1, Rational(0));
    out.tail.coeffs.assign(1, Rational(0));

    // Step 1 from the empty set: an outside arrival leaves it empty (return
    // at k=1), an inside arrival starts the excursion with one survivor.
    add_monomial(out.pmf[0], Rational(1), 0, 1);

    // Alive states after the current step: (m << 16 | rank mask) -> summed
    // weight of all rank-order paths reaching it. Weights carry only the
    // 1/j rank factors; the q powers are attached at absorption.
    std::map<std::uint32_t, Rational> states;
    if (kmax >= 1) states[(1u << 16) | 1u] = Rational(1);

    for (int k = 2; k <= kmax; ++k) {
        std::map<std::uint32_t, Rational> next;
        for (const auto& [key, w] : states) {
            const int m = static_cast<int>(key >> 16);
            const std::uint32_t mask = key & 0xffffu;

            // Outside arrival: the minimum goes.
            const std::uint32_t after_out = mask & (mask - 1);
            if (after_out == 0)
                add_monomial(out.pmf[k - 1], w, m, k - m);
            else
                next[(static_cast<std::uint32_t>(m) << 16) | after_out] += w;

            // Inside arrival: rank r among the now m+1 inside positions,
            // each rank equally likely.
            const Rational share = w / (m + 1);
            for (int r = 1; r <= m + 1; ++r) {
                const std::uint32_t new_mask = apply_inside(shift_ranks(mask, r), r);
                next[(static_cast<std::uint32_t>(m + 1) << 16) | new_mask] += share;
            }
        }
        states = std::move(next);
    }

    for (const auto& [key, w] : states) {
        const int m = static_cast<int>(key >> 16);
        add_monomial(out.tail, w, m, kmax - m);
    }
    for (ProbPoly& p : out.pmf) p.trim();
    out.tail.trim();
    return out;
}

void walk_unmerged(int k, int kmax, int m, std::uint32_t mask, const Rational& w,
                   std::vector<ProbPoly>& pmf) {
    if (k == kmax) return;
    const std::uint32_t after_out = mask & (mask - 1);
    if (after_out == 0)
        add_monomial(pmf[k], w, m, k + 1 - m);
    else
        walk_unmerged(k + 1, kmax, m, after_out, w, pmf);

    const Rational share = w / (m + 1);
    for (int r = 1; r <= m + 1; ++r)
        walk_unmerged(k + 1, kmax, m + 1, apply_inside(shift_ranks(mask, r), r), share, pmf);
}

}  // namespace

std::vector<ProbPoly> exact_return_pmf(int kmax) { return enumerate_merged(kmax).pmf; }

ProbPoly exact_return_tail(int kmax) { return enumerate_merged(kmax).tail; }

std::vector<ProbPoly> exact_return_pmf_nomemo(int kmax) {
    check_kmax(kmax);
    require(kmax <= 8, "the unmerged walk is for small cross-checks only");
    std::vector<ProbPoly> pmf(kmax);
    for (ProbPoly& p : pmf) p.coeffs.assign(1, Rational(0));
    add_monomial(pmf[0], Rational(1), 0, 1);
    if (kmax >= 2) walk_unmerged(1, kmax, 1, 1u, Rational(1), pmf);
    for (ProbPoly& p : pmf) p.trim();
    return pmf;
}

ProbPoly truncated_mean_poly(int kmax) {
    const std::vector<ProbPoly> pmf = exact_return_pmf(kmax);
    ProbPoly acc;
    acc.coeffs.assign(1, Rational(0));
    for (int k = 1; k <= kmax; ++k) acc = poly_add(acc, poly_scale(pmf[k - 1], Rational(k)));
    return acc;
}

TruncatedMeanCheck truncated_mean_check(int kmax, double q) {
    require(q >= 0.0 && q < kCriticalQ, "cutoff must lie below the critical point");
    const Enumeration e = enumerate_merged(kmax);
    ProbPoly mean_poly;
    mean_poly.coeffs.assign(1, Rational(0));
    for (int k = 1; k <= kmax; ++k)
        mean_poly = poly_add(mean_poly, poly_scale(e.pmf[k - 1], Rational(k)));

    TruncatedMeanCheck out;
    out.lower = mean_poly.eval(q);
    out.tail_mass = e.tail.eval(q);
    out.diagnostic = out.lower + static_cast<double>(kmax + 1) * out.tail_mass;
    out.closed_form = closed_form_mean_return(q);
    if (out.lower > out.closed_form + 1e-12)
        throw std::logic_error("truncated mean exceeds the exact mean; enumeration inconsistent");
    return out;
}

std::string poly_to_json(const ProbPoly& poly, int k) {
    std::ostringstream os;
    os << "{\"k\": " << k << ", \"coeffs\": [";
    for (std::size_t i = 0; i < poly.coeffs.size(); ++i) {
        if (i > 0) os << ", ";
        os << "[\"" << numerator(poly.coeffs[i]).str() << "\", \""
           << denominator(poly.coeffs[i]).str() << "\"]";
    }
    os << "]}";
    return os.str();
}

std::string pmf_list_to_json(const std::vector<ProbPoly>& polys) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < polys.size(); ++i) {
        if (i > 0) os << ", ";
        os << poly_to_json(polys[i], static_cast<int>(i) + 1);
    }
    os << "]";
    return os.str();
}

}  // namespace canyon
