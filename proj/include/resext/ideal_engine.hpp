#pragma once

// Multiplier ideals, jumping numbers, adjoint ideals and sigma-lc centres for
// diagonal weights. Everything here is exact rational arithmetic.
//
// With e_j = c_j + m nu_j, z^a is in I(phi_L + m psi) iff a_j > e_j - 1 for all
// j (integrability of x^{a_j - e_j} near 0).

#include "resext/errors.hpp"
#include "resext/monomial_ideal.hpp"
#include "resext/rational.hpp"
#include "resext/toric_model.hpp"

#include <algorithm>
#include <cstddef>
#include <set>
#include <vector>

namespace resext {

namespace detail {

/// Smallest integer strictly greater than e - 1, clamped at zero.
inline int min_exponent(const Rational& e)
{
    BigInt k = floor(Rational(e - 1)) + 1;
    return k < 0 ? 0 : static_cast<int>(to_ll(k));
}

/// Smallest integer >= e - 1 (the left limit as m increases to a jump), clamped at zero.
inline int min_exponent_left_limit(const Rational& e)
{
    Rational shifted = e - 1;
    BigInt k = floor(shifted);
    if (!is_integer(shifted)) k += 1;
    return k < 0 ? 0 : static_cast<int>(to_ll(k));
}

inline void enumerate_subsets(const std::vector<std::size_t>& pool, std::size_t size, std::size_t start,
                              std::vector<std::size_t>& current, std::vector<std::vector<std::size_t>>& out)
{
    if (current.size() == size) {
        out.push_back(current);
        return;
    }
    for (std::size_t i = start; i < pool.size(); ++i) {
        if (pool.size() - i < size - current.size()) break;
        current.push_back(pool[i]);
        enumerate_subsets(pool, size, i + 1, current, out);
        current.pop_back();
    }
}

} // namespace detail

inline MonomialIdeal multiplier_ideal(const ToricData& data, const Rational& m)
{
    if (m < 0) throw PreconditionError("m must be nonnegative");
    Exponent a(data.n);
    for (std::size_t j = 0; j < data.n; ++j) a[j] = detail::min_exponent(data.exponent(j, m));
    return MonomialIdeal::principal(std::move(a));
}

/// I(phi_L + m' psi) for m' slightly below m; equals I(phi_L + m_{k-1} psi) at a jump m = m_k.
inline MonomialIdeal multiplier_ideal_left_limit(const ToricData& data, const Rational& m)
{
    Exponent a(data.n);
    for (std::size_t j = 0; j < data.n; ++j) {
        const Rational e = data.exponent(j, m);
        a[j] = data.nu[j] > 0 ? detail::min_exponent_left_limit(e) : detail::min_exponent(e);
    }
    return MonomialIdeal::principal(std::move(a));
}

inline JumpSchedule jumping_numbers(const ToricData& data, const Rational& lo, const Rational& hi)
{
    if (lo < 0) throw PreconditionError("range start must be nonnegative");
    JumpSchedule s;
    s.lo = lo;
    s.hi = hi;
    std::set<Rational> found;
    if (hi > lo) {
        for (std::size_t j = 0; j < data.n; ++j) {
            if (data.nu[j] == 0) continue;
            // c_j + m nu_j = k for integers k >= 1 with lo < m <= hi.
            const Rational e_lo = data.exponent(j, lo);
            const Rational e_hi = data.exponent(j, hi);
            BigInt k = floor(e_lo) + 1;
            if (k < 1) k = 1;
            for (; Rational(k) <= e_hi; ++k) {
                const Rational m = (Rational(k) - data.c[j]) / data.nu[j];
                if (m > lo && m <= hi) found.insert(m);
            }
        }
    }
    s.jumps.assign(found.begin(), found.end());
    s.ideals.push_back(multiplier_ideal(data, lo));
    for (const auto& m : s.jumps) s.ideals.push_back(multiplier_ideal(data, m));
    return s;
}

/// Relevant divisors at a jump and the sigma-lc centres they cut out.
struct LcStructure {
    std::size_t n = 0;
    std::vector<std::size_t> relevant;
    std::size_t sigma_mlc = 0;

    /// All sigma-element subsets of the relevant set, lexicographic. centres(0)
    /// is the single empty subset (the whole space).
    std::vector<std::vector<std::size_t>> centres(std::size_t sigma) const
    {
        std::vector<std::vector<std::size_t>> out;
        if (sigma > sigma_mlc) return out;
        std::vector<std::size_t> current;
        detail::enumerate_subsets(relevant, sigma, 0, current, out);
        return out;
    }

    /// Radical ideal of lcc_sigma, the union of the sigma-lc centres: square-free
    /// monomials of degree |J| - sigma + 1 in the relevant variables. The unit
    /// ideal when sigma > sigma_mlc (empty union).
    MonomialIdeal lcc_ideal(std::size_t sigma) const
    {
        if (sigma > sigma_mlc) return MonomialIdeal::unit(n);
        if (sigma == 0) return MonomialIdeal::zero(n);
        std::vector<std::vector<std::size_t>> subsets;
        std::vector<std::size_t> current;
        detail::enumerate_subsets(relevant, relevant.size() - sigma + 1, 0, current, subsets);
        std::vector<Exponent> gens;
        for (const auto& sub : subsets) {
            Exponent g(n, 0);
            for (std::size_t j : sub) g[j] = 1;
            gens.push_back(std::move(g));
        }
        return MonomialIdeal(n, std::move(gens));
    }
};

inline LcStructure lc_structure(const ToricData& data)
{
    LcStructure lc;
    lc.n = data.n;
    lc.relevant = relevant_indices(data);
    if (lc.relevant.empty()) throw NotAJumpError("m = " + to_string(data.m) + " is not a jumping number");
    lc.sigma_mlc = lc.relevant.size();
    return lc;
}

/// A_sigma = I(phi_L + m_{k-1} psi) * I(lcc_{sigma+1}) at the jump data.m.
inline MonomialIdeal adjoint_ideal(const ToricData& data, const JumpSchedule& jumps, std::size_t sigma)
{
    const LcStructure lc = lc_structure(data);
    if (!jumps.is_jump(data.m)) throw NotAJumpError("m = " + to_string(data.m) + " is not in the jump schedule");
    if (sigma == 0) return multiplier_ideal(data, data.m);
    const MonomialIdeal& previous = jumps.ideal_at(jumps.predecessor(data.m));
    if (sigma >= lc.sigma_mlc) return previous;
    return previous.product(lc.lcc_ideal(sigma + 1));
}

/// {j relevant : a_j + 1 == e_j}.
inline std::vector<std::size_t> equality_set(const ToricData& data, const Exponent& a)
{
    std::vector<std::size_t> out;
    for (std::size_t j : relevant_indices(data)) {
        if (Rational(a[j] + 1) == data.exponent(j)) out.push_back(j);
    }
    return out;
}

/// Direct test of z^a in A_sigma from the exponent inequalities.
inline bool combinatorial_membership(const ToricData& data, const Exponent& a, std::size_t sigma)
{
    if (a.size() != data.n) throw PreconditionError("exponent has wrong dimension");
    const auto relevant = relevant_indices(data);
    std::size_t equalities = 0;
    for (std::size_t j = 0; j < data.n; ++j) {
        if (a[j] < 0) throw PreconditionError("negative exponent");
        const Rational e = data.exponent(j);
        const Rational lhs = Rational(a[j]);
        if (std::binary_search(relevant.begin(), relevant.end(), j)) {
            if (lhs + 1 < e) return false;
            if (lhs + 1 == e) ++equalities;
        } else if (!(lhs > e - 1)) {
            return false;
        }
    }
    return equalities <= sigma;
}

} // namespace resext
