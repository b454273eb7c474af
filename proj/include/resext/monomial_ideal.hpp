#pragma once

#include "resext/errors.hpp"
#include "resext/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

namespace resext {

/// Exponent vector of a monomial z^a.
using Exponent = std::vector<int>;

inline bool divides(const Exponent& g, const Exponent& a)
{
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (g[j] > a[j]) return false;
    }
    return true;
}

/// Monomial ideal in C{z_1..z_n}, stored as its minimal generators.
class MonomialIdeal {
public:
    MonomialIdeal() = default;

    static MonomialIdeal unit(std::size_t n) { return MonomialIdeal(n, {Exponent(n, 0)}); }
    static MonomialIdeal zero(std::size_t n) { return MonomialIdeal(n, {}); }
    static MonomialIdeal principal(Exponent a)
    {
        const std::size_t n = a.size();
        return MonomialIdeal(n, {std::move(a)});
    }

    /// Any generating set; reduced to the minimal antichain.
    MonomialIdeal(std::size_t n, std::vector<Exponent> gens) : n_(n), gens_(std::move(gens))
    {
        for (const auto& g : gens_) {
            if (g.size() != n_) throw PreconditionError("generator has wrong dimension");
            for (int e : g) {
                if (e < 0) throw PreconditionError("negative exponent in generator");
            }
        }
        reduce();
    }

    std::size_t dimension() const { return n_; }
    const std::vector<Exponent>& generators() const { return gens_; }
    bool is_zero() const { return gens_.empty(); }
    bool is_unit() const { return gens_.size() == 1 && std::all_of(gens_[0].begin(), gens_[0].end(), [](int e) { return e == 0; }); }

    bool contains(const Exponent& a) const
    {
        return std::any_of(gens_.begin(), gens_.end(), [&](const Exponent& g) { return divides(g, a); });
    }

    /// True when `other` is a subset of this ideal.
    bool contains(const MonomialIdeal& other) const
    {
        return std::all_of(other.gens_.begin(), other.gens_.end(), [&](const Exponent& g) { return contains(g); });
    }

    MonomialIdeal product(const MonomialIdeal& other) const
    {
        std::vector<Exponent> out;
        out.reserve(gens_.size() * other.gens_.size());
        for (const auto& a : gens_) {
            for (const auto& b : other.gens_) {
                Exponent c(n_);
                for (std::size_t j = 0; j < n_; ++j) c[j] = a[j] + b[j];
                out.push_back(std::move(c));
            }
        }
        return MonomialIdeal(n_, std::move(out));
    }

    bool is_square_free() const
    {
        return std::all_of(gens_.begin(), gens_.end(), [](const Exponent& g) {
            return std::all_of(g.begin(), g.end(), [](int e) { return e <= 1; });
        });
    }

    friend bool operator==(const MonomialIdeal& a, const MonomialIdeal& b) { return a.n_ == b.n_ && a.gens_ == b.gens_; }

private:
    void reduce()
    {
        std::sort(gens_.begin(), gens_.end());
        gens_.erase(std::unique(gens_.begin(), gens_.end()), gens_.end());
        std::vector<Exponent> minimal;
        for (std::size_t i = 0; i < gens_.size(); ++i) {
            bool redundant = false;
            for (std::size_t k = 0; k < gens_.size() && !redundant; ++k) {
                redundant = k != i && divides(gens_[k], gens_[i]);
            }
            if (!redundant) minimal.push_back(gens_[i]);
        }
        gens_ = std::move(minimal);
    }

    std::size_t n_ = 0;
    std::vector<Exponent> gens_;
};

/// Jumping numbers of m -> I(phi_L + m psi) on (lo, hi].
///
/// ideals[0] is the ideal on [lo, jumps[0]), ideals[i] the ideal on
/// [jumps[i-1], jumps[i]) and the last entry the ideal from the final jump on.
struct JumpSchedule {
    Rational lo;
    Rational hi;
    std::vector<Rational> jumps;
    std::vector<MonomialIdeal> ideals;

    bool is_jump(const Rational& m) const { return std::find(jumps.begin(), jumps.end(), m) != jumps.end(); }

    /// The jump before m in this schedule, or the range start when there is none.
    Rational predecessor(const Rational& m) const
    {
        Rational prev = lo;
        for (const auto& j : jumps) {
            if (j >= m) break;
            prev = j;
        }
        return prev;
    }

    /// Ideal in force at m (lo <= m <= hi).
    const MonomialIdeal& ideal_at(const Rational& m) const
    {
        std::size_t k = 0;
        while (k < jumps.size() && jumps[k] <= m) ++k;
        return ideals[k];
    }
};

} // namespace resext
