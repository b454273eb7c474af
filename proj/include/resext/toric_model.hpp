#pragma once

// Model geometry on the closed unit polydisc.
//
// Points are given by their squared moduli x_j = |z_j|^2 in [0,1]^n. All
// weights are diagonal:
//   phi_L = sum_j c_j log x_j + P(x),   psi = sum_j nu_j log x_j - 1,
// with P a polynomial in the squared moduli. K_X and L are trivialised, so a
// section is a holomorphic function and e^{-phi_L} is the literal weight.

#include "resext/errors.hpp"
#include "resext/monomial_ideal.hpp"
#include "resext/rational.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace resext {

/// Polynomial in the squared moduli with rational coefficients.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::map<Exponent, Rational> terms) : terms_(std::move(terms)) { prune(); }

    static Polynomial monomial(Exponent a, Rational coef)
    {
        return Polynomial(std::map<Exponent, Rational>{{std::move(a), std::move(coef)}});
    }

    const std::map<Exponent, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    double operator()(std::span<const double> x) const
    {
        double acc = 0.0;
        for (const auto& [a, coef] : terms_) {
            double mono = to_double(coef);
            for (std::size_t j = 0; j < a.size(); ++j) {
                if (a[j] != 0) mono *= std::pow(x[j], a[j]);
            }
            acc += mono;
        }
        return acc;
    }

    /// x_j * d/dx_j, i.e. the derivative with respect to log x_j.
    Polynomial log_derivative(std::size_t j) const
    {
        std::map<Exponent, Rational> out;
        for (const auto& [a, coef] : terms_) {
            if (a[j] != 0) out[a] += coef * a[j];
        }
        return Polynomial(std::move(out));
    }

    /// The polynomial with x_j = 0 for every j in `coords`.
    Polynomial restricted(std::span<const std::size_t> coords) const
    {
        std::map<Exponent, Rational> out;
        for (const auto& [a, coef] : terms_) {
            bool vanishes = std::any_of(coords.begin(), coords.end(), [&](std::size_t j) { return a[j] != 0; });
            if (!vanishes) out[a] += coef;
        }
        return Polynomial(std::move(out));
    }

    Polynomial operator-(const Polynomial& other) const
    {
        auto out = terms_;
        for (const auto& [a, coef] : other.terms_) out[a] -= coef;
        return Polynomial(std::move(out));
    }

    /// Sum of |coefficients|; bounds |P| on [0,1]^n.
    double abs_coefficient_sum() const
    {
        double s = 0.0;
        for (const auto& [a, coef] : terms_) s += std::abs(to_double(coef));
        return s;
    }

    /// Bound on the sup-norm Lipschitz constant on [0,1]^n (per unit of max-norm step).
    double lipschitz_bound() const
    {
        double s = 0.0;
        for (const auto& [a, coef] : terms_) {
            int deg = 0;
            for (int e : a) deg += e;
            s += std::abs(to_double(coef)) * deg;
        }
        return s;
    }

    /// True when every coefficient is nonnegative (P non-decreasing in each x_j).
    bool is_monotone_nondecreasing() const
    {
        return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second >= 0; });
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

private:
    void prune()
    {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (it->second == 0) {
                it = terms_.erase(it);
            } else {
                for (int e : it->first) {
                    if (e < 0) throw PreconditionError("negative exponent in polynomial");
                }
                ++it;
            }
        }
    }

    std::map<Exponent, Rational> terms_;
};

/// Diagonal weight data (c, nu, m) plus an optional bounded toric term in phi_L.
struct ToricData {
    std::size_t n = 0;
    std::vector<Rational> c;
    std::vector<Rational> nu;
    Polynomial smooth_term;
    Rational m;

    static ToricData make(std::vector<Rational> c, std::vector<Rational> nu, Rational m, Polynomial smooth = {})
    {
        ToricData d;
        d.n = c.size();
        d.c = std::move(c);
        d.nu = std::move(nu);
        d.m = std::move(m);
        d.smooth_term = std::move(smooth);
        d.validate();
        return d;
    }

    void validate() const
    {
        if (n == 0) throw PreconditionError("dimension must be at least 1");
        if (c.size() != n || nu.size() != n) throw PreconditionError("c and nu must both have n entries");
        bool any_positive = false;
        for (std::size_t j = 0; j < n; ++j) {
            if (c[j] < 0) throw PreconditionError("c_j must be nonnegative");
            if (nu[j] < 0) throw PreconditionError("nu_j must be nonnegative");
            any_positive = any_positive || nu[j] > 0;
        }
        if (!any_positive) throw PreconditionError("at least one nu_j must be positive");
        if (m < 0) throw PreconditionError("m must be nonnegative");
        for (const auto& [a, coef] : smooth_term.terms()) {
            if (a.size() != n) throw PreconditionError("smooth_term exponent has wrong dimension");
        }
    }

    ToricData with_m(Rational new_m) const
    {
        ToricData d = *this;
        d.m = std::move(new_m);
        d.validate();
        return d;
    }

    /// e_j = c_j + m nu_j at the given multiplier.
    Rational exponent(std::size_t j, const Rational& mult) const { return c[j] + mult * nu[j]; }
    Rational exponent(std::size_t j) const { return exponent(j, m); }

    std::vector<Rational> exponents() const
    {
        std::vector<Rational> e(n);
        for (std::size_t j = 0; j < n; ++j) e[j] = exponent(j);
        return e;
    }
};

/// Finite sum of coefficient * z^a.
class MonomialSection {
public:
    using Coefficient = std::complex<double>;

    MonomialSection() = default;
    explicit MonomialSection(std::size_t n) : n_(n) {}

    static MonomialSection monomial(Exponent a, Coefficient coef = 1.0)
    {
        MonomialSection s(a.size());
        s.add(std::move(a), coef);
        return s;
    }

    std::size_t dimension() const { return n_; }
    const std::map<Exponent, Coefficient>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(Exponent a, Coefficient coef)
    {
        if (n_ == 0) n_ = a.size();
        if (a.size() != n_) throw PreconditionError("monomial has wrong dimension");
        for (int e : a) {
            if (e < 0) throw PreconditionError("negative exponent in section");
        }
        auto& slot = terms_[std::move(a)];
        slot += coef;
        prune();
    }

    MonomialSection operator+(const MonomialSection& o) const
    {
        MonomialSection out = *this;
        if (out.n_ == 0) out.n_ = o.n_;
        for (const auto& [a, coef] : o.terms_) out.add(a, coef);
        return out;
    }

    MonomialSection operator-(const MonomialSection& o) const
    {
        MonomialSection out = *this;
        if (out.n_ == 0) out.n_ = o.n_;
        for (const auto& [a, coef] : o.terms_) out.add(a, -coef);
        return out;
    }

    /// The restriction to the coordinate subspace {z_j = 0 : j in coords}.
    MonomialSection restricted(std::span<const std::size_t> coords) const
    {
        MonomialSection out(n_);
        for (const auto& [a, coef] : terms_) {
            bool vanishes = std::any_of(coords.begin(), coords.end(), [&](std::size_t j) { return a[j] != 0; });
            if (!vanishes) out.add(a, coef);
        }
        return out;
    }

    std::complex<double> operator()(std::span<const std::complex<double>> z) const
    {
        std::complex<double> acc = 0.0;
        for (const auto& [a, coef] : terms_) {
            std::complex<double> mono = coef;
            for (std::size_t j = 0; j < a.size(); ++j) {
                for (int k = 0; k < a[j]; ++k) mono *= z[j];
            }
            acc += mono;
        }
        return acc;
    }

    friend bool operator==(const MonomialSection& a, const MonomialSection& b) { return a.terms_ == b.terms_; }

private:
    void prune()
    {
        for (auto it = terms_.begin(); it != terms_.end();) {
            it = (it->second == Coefficient(0.0)) ? terms_.erase(it) : std::next(it);
        }
    }

    std::size_t n_ = 0;
    std::map<Exponent, Coefficient> terms_;
};

/// phi_L + m psi = bphi + phi_{S_0} + phi_S at a jump m.
///
/// bphi = sum_j bphi_exponents_j log x_j + bphi_smooth + constant; phi_{S_0} =
/// sum_j s0_j log x_j; phi_S = sum_{j in relevant} log x_j.
struct PotentialDecomposition {
    std::vector<std::size_t> relevant;
    std::vector<Rational> s0;
    std::vector<Rational> bphi_exponents;
    Polynomial bphi_smooth;
    Rational constant;

    bool is_relevant(std::size_t j) const { return std::binary_search(relevant.begin(), relevant.end(), j); }

    /// c_j + m nu_j == bphi_j + s0_j + [j relevant], exactly.
    bool reconstructs(const ToricData& data) const
    {
        for (std::size_t j = 0; j < data.n; ++j) {
            Rational rhs = bphi_exponents[j] + s0[j] + Rational(is_relevant(j) ? 1 : 0);
            if (data.exponent(j) != rhs) return false;
        }
        return constant == -data.m && bphi_smooth == data.smooth_term;
    }
};

/// psi = sum nu_j log x_j - 1. Returns -infinity when x_j = 0 for some nu_j > 0.
inline double eval_psi(const ToricData& data, std::span<const double> x)
{
    double acc = -1.0;
    for (std::size_t j = 0; j < data.n; ++j) {
        if (data.nu[j] == 0) continue;
        if (x[j] <= 0.0) return -std::numeric_limits<double>::infinity();
        acc += to_double(data.nu[j]) * std::log(x[j]);
    }
    return acc;
}

/// phi_L + m psi at an interior point.
inline double eval_weight_potential(const ToricData& data, std::span<const double> x)
{
    double acc = data.smooth_term(x) - to_double(data.m);
    for (std::size_t j = 0; j < data.n; ++j) {
        const double e = to_double(data.exponent(j));
        if (e != 0.0) acc += e * std::log(x[j]);
    }
    return acc;
}

/// bphi + phi_{S_0} + phi_S at an interior point.
inline double eval_decomposed_potential(const PotentialDecomposition& d, std::span<const double> x)
{
    double bphi = d.bphi_smooth(x) + to_double(d.constant);
    double s0 = 0.0, s = 0.0;
    for (std::size_t j = 0; j < d.s0.size(); ++j) {
        const double lx = std::log(x[j]);
        bphi += to_double(d.bphi_exponents[j]) * lx;
        s0 += to_double(d.s0[j]) * lx;
        if (d.is_relevant(j)) s += lx;
    }
    return bphi + s0 + s;
}

/// Coordinates j with nu_j > 0 and c_j + m nu_j a positive integer.
inline std::vector<std::size_t> relevant_indices(const ToricData& data)
{
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < data.n; ++j) {
        if (data.nu[j] == 0) continue;
        const Rational e = data.exponent(j);
        if (is_integer(e) && e >= 1) out.push_back(j);
    }
    return out;
}

inline PotentialDecomposition decompose_potential(const ToricData& data, const JumpSchedule& jumps)
{
    if (!jumps.is_jump(data.m)) {
        throw NotAJumpError("m = " + to_string(data.m) + " is not a jumping number of the schedule");
    }
    PotentialDecomposition d;
    d.relevant = relevant_indices(data);
    if (d.relevant.empty()) throw NotAJumpError("no relevant divisor at m = " + to_string(data.m));
    d.s0.assign(data.n, Rational(0));
    d.bphi_exponents.assign(data.n, Rational(0));
    for (std::size_t j = 0; j < data.n; ++j) {
        const Rational e = data.exponent(j);
        if (d.is_relevant(j)) {
            d.s0[j] = e - 1;
        } else {
            d.bphi_exponents[j] = e;
        }
    }
    d.bphi_smooth = data.smooth_term;
    d.constant = -data.m;
    return d;
}

/// r_j^2 d/d(r_j^2) of psi + smooth_term, as a function of the squared moduli.
class AdmissibilityProfile {
public:
    AdmissibilityProfile(Rational nu, Polynomial perturbation) : nu_(std::move(nu)), perturbation_(std::move(perturbation)) {}

    double operator()(std::span<const double> x) const { return to_double(nu_) + perturbation_(x); }
    const Rational& value_on_divisor() const { return nu_; }
    bool is_constant() const { return perturbation_.is_zero(); }

private:
    Rational nu_;
    Polynomial perturbation_;
};

namespace detail {

/// Calls fn on every point of the uniform grid with `steps` intervals per axis.
template <class Fn>
void for_each_grid_point(std::size_t n, int steps, Fn&& fn)
{
    std::vector<int> idx(n, 0);
    std::vector<double> x(n, 0.0);
    while (true) {
        for (std::size_t j = 0; j < n; ++j) x[j] = static_cast<double>(idx[j]) / steps;
        fn(std::span<const double>(x));
        std::size_t k = 0;
        while (k < n && ++idx[k] > steps) idx[k++] = 0;
        if (k == n) break;
    }
}

} // namespace detail

/// The profile in direction j; throws PositivityError if it is not positive on [0,1]^n.
inline AdmissibilityProfile admissibility_profile(const ToricData& data, std::size_t j)
{
    if (j >= data.n) throw PreconditionError("coordinate index out of range");
    if (data.nu[j] <= 0) throw PreconditionError("admissibility profile needs nu_j > 0");
    AdmissibilityProfile profile(data.nu[j], data.smooth_term.log_derivative(j));
    if (profile.is_constant()) return profile;

    const int steps = data.n <= 3 ? 32 : 12;
    const Polynomial d = data.smooth_term.log_derivative(j);
    const double margin = d.lipschitz_bound() / (2.0 * steps);
    double lowest = std::numeric_limits<double>::infinity();
    detail::for_each_grid_point(data.n, steps, [&](std::span<const double> x) { lowest = std::min(lowest, profile(x)); });
    if (lowest - margin <= 0.0) {
        throw PositivityError("admissibility profile is not positive on the polydisc (grid minimum " +
                              std::to_string(lowest) + ")");
    }
    return profile;
}

/// One factor of a separable bump: b(|x - center| / radius) in one squared modulus.
struct BumpFactor {
    double center = 0.0;
    double radius = 0.5;
};

/// Compactly supported C^2 test function, a product of one-variable profiles
/// in the squared moduli. Coordinates without a factor are unconstrained (the
/// function is constant along them); `centre` lists the coordinates of the
/// subspace the bump is meant to live on.
class BumpFunction {
public:
    BumpFunction() = default;

    static BumpFunction unit(std::size_t n)
    {
        BumpFunction g;
        g.factors_.assign(n, std::nullopt);
        return g;
    }

    static BumpFunction zero(std::size_t n)
    {
        BumpFunction g = unit(n);
        g.zero_ = true;
        return g;
    }

    /// Bump on the coordinate subspace {z_j = 0 : j in centre}. `centers` holds
    /// one squared-modulus center per coordinate (entries on `centre` ignored).
    static BumpFunction on_centre(std::vector<std::size_t> centre, const std::vector<double>& centers, double radius,
                                  double margin)
    {
        BumpFunction g = unit(centers.size());
        std::sort(centre.begin(), centre.end());
        g.centre_ = std::move(centre);
        g.margin_ = margin;
        for (std::size_t j = 0; j < centers.size(); ++j) {
            if (!std::binary_search(g.centre_.begin(), g.centre_.end(), j)) {
                g.factors_[j] = BumpFactor{centers[j], radius};
            }
        }
        g.check_support();
        return g;
    }

    static BumpFunction separable(std::vector<std::optional<BumpFactor>> factors)
    {
        BumpFunction g;
        g.factors_ = std::move(factors);
        g.check_support();
        return g;
    }

    /// C^2 profile: 1 on [0, 1/2], 0 on [1, inf), quintic smoothstep between.
    static double profile(double s)
    {
        s = std::abs(s);
        if (s <= 0.5) return 1.0;
        if (s >= 1.0) return 0.0;
        const double u = 2.0 * s - 1.0;
        return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
    }

    double operator()(std::span<const double> x) const
    {
        if (zero_) return 0.0;
        double v = 1.0;
        for (std::size_t j = 0; j < factors_.size(); ++j) {
            if (factors_[j]) v *= profile((x[j] - factors_[j]->center) / factors_[j]->radius);
        }
        return v;
    }

    std::size_t dimension() const { return factors_.size(); }
    bool is_zero() const { return zero_; }
    const std::vector<std::size_t>& centre() const { return centre_; }
    const std::optional<BumpFactor>& factor(std::size_t j) const { return factors_[j]; }
    double margin() const { return margin_; }

    /// Closed squared-modulus interval containing the support in coordinate j.
    std::pair<double, double> support(std::size_t j) const
    {
        if (!factors_[j]) return {0.0, 1.0};
        const auto& f = *factors_[j];
        return {std::max(0.0, f.center - f.radius), std::min(1.0, f.center + f.radius)};
    }

    /// Support stays at least `margin` away from {z_j = 0} for every listed
    /// divisor that is not part of the centre.
    bool respects_margin(std::span<const std::size_t> divisors) const
    {
        for (std::size_t j : divisors) {
            if (std::binary_search(centre_.begin(), centre_.end(), j)) continue;
            if (support(j).first < margin_) return false;
        }
        return true;
    }

private:
    void check_support() const
    {
        for (const auto& f : factors_) {
            if (!f) continue;
            if (f->radius <= 0.0 || f->radius >= 1.0) throw PreconditionError("bump radius must lie in (0,1)");
            if (f->center + f->radius >= 1.0) throw PreconditionError("bump support must stay inside the open polydisc");
        }
    }

    std::vector<std::optional<BumpFactor>> factors_;
    std::vector<std::size_t> centre_;
    double margin_ = 0.0;
    bool zero_ = false;
};

} // namespace resext
