#pragma once

// Singular integrals over log coordinates t_j = -ln x_j in [0, inf)^n.
//
// Every integrand handled here has the shape
//
//     prefactor * prod_j e^{-beta_j t_j} * h(x) * K(1 + <nu, t>)
//
// where h is a bounded smooth factor and K is a kernel in |psi| = 1 + <nu,t>
// alone. The deterministic engine therefore works on level sets of
// p = <nu, t>: one "pivot" coordinate is eliminated, the remaining ones are
// integrated as slack variables, and the kernel becomes a one-dimensional
// weight on the level density A(p). The residue integral is then
//
//     eps * int Phi(p) / (ln(ell (1+p)))^{1+eps} dp/(1+p),  Phi = A / (1+p)^{sigma-1},
//
// integrated in lambda = ln(1+p) up to a saturation point where Phi has
// reached its limit, with the remaining tail done in closed form.

#include "resext/detail/summation.hpp"
#include "resext/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace resext {

enum class QuadStatus { Converged, Divergent, Inconclusive };

inline const char* to_string(QuadStatus s)
{
    switch (s) {
    case QuadStatus::Converged: return "converged";
    case QuadStatus::Divergent: return "divergent";
    case QuadStatus::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

enum class QuadEngine { Automatic, Deterministic, MonteCarlo };

/// Range of one log coordinate. Bump supports in x translate to bounded t ranges.
struct CoordinateRange {
    double t_min = 0.0;
    double t_max = std::numeric_limits<double>::infinity();

    bool bounded() const { return std::isfinite(t_max); }
    double width() const { return t_max - t_min; }

    static CoordinateRange from_support(double x_lo, double x_hi)
    {
        CoordinateRange r;
        r.t_min = x_hi >= 1.0 ? 0.0 : -std::log(x_hi);
        r.t_max = x_lo <= 0.0 ? std::numeric_limits<double>::infinity() : -std::log(x_lo);
        return r;
    }
};

/// Bounded factor of the squared moduli x_j = e^{-t_j}.
using SmoothFactor = std::function<double(std::span<const double>)>;

struct IntegralSpec {
    std::vector<double> beta;
    std::vector<double> nu;
    int sigma = 1;
    double eps = 1.0;
    double ell = std::numbers::e;
    /// Empty means [0, inf) in every coordinate.
    std::vector<CoordinateRange> ranges;
    /// Points in t where the smooth factor has a kink, per coordinate. Optional.
    std::vector<std::vector<double>> breakpoints;
    SmoothFactor smooth_factor;
    double prefactor = 1.0;
    /// The power of the log factor is log_power + eps. Only negative-control
    /// tests change it from 1.
    double log_power = 1.0;

    std::size_t dimension() const { return beta.size(); }
    CoordinateRange range(std::size_t j) const { return ranges.empty() ? CoordinateRange{} : ranges[j]; }

    void validate() const
    {
        const std::size_t n = beta.size();
        if (n == 0) throw PreconditionError("integral needs at least one coordinate");
        if (nu.size() != n) throw PreconditionError("beta and nu must have the same length");
        if (!ranges.empty() && ranges.size() != n) throw PreconditionError("ranges must be empty or have n entries");
        if (!breakpoints.empty() && breakpoints.size() != n) {
            throw PreconditionError("breakpoints must be empty or have n entries");
        }
        bool any_nu = false;
        for (std::size_t j = 0; j < n; ++j) {
            if (!(nu[j] >= 0.0)) throw PreconditionError("nu must be nonnegative");
            if (!std::isfinite(beta[j])) throw PreconditionError("beta must be finite");
            any_nu = any_nu || nu[j] > 0.0;
            const auto r = range(j);
            if (!(r.t_min >= 0.0) || !(r.t_max >= r.t_min)) throw PreconditionError("invalid coordinate range");
        }
        if (!any_nu) throw PreconditionError("at least one nu_j must be positive");
        if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
        if (!(ell >= std::numbers::e * (1.0 - 1e-12))) throw PreconditionError("ell must be at least e");
        if (sigma < 0) throw PreconditionError("kernel index must be nonnegative");
        if (!(prefactor >= 0.0)) throw PreconditionError("prefactor must be nonnegative");
    }
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    QuadStatus status = QuadStatus::Converged;
    /// Exhaustion partial sums S_i (already multiplied by the prefactor).
    std::vector<double> evidence;
    std::string engine;

    bool converged() const { return status == QuadStatus::Converged; }
};

struct QuadOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-13;
    QuadEngine engine = QuadEngine::Automatic;
    bool detect_divergence = true;
    double detection_tol = 1e-6;
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
    std::size_t mc_batch_size = std::size_t{1} << 16;
    std::size_t mc_batches = 32;
    double mc_rel_tol = 1e-3;
};

namespace detail {

inline constexpr double kEdgeWidth = 40.0;
inline constexpr double kDetectionStart = 8.0;
inline constexpr int kMaxDoublings = 24;

template <class F>
double gk_integrate(F&& f, double a, double b, double tol, unsigned depth, double* err_acc)
{
    if (!(b > a)) return 0.0;
    double err = 0.0;
    const double v =
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(std::forward<F>(f), a, b, depth, tol, &err);
    if (err_acc) *err_acc += std::abs(err);
    return v;
}

/// Integral over [a, b] split at the given interior points (sorted or not).
template <class F>
double gk_piecewise(F&& f, double a, double b, std::vector<double> cuts, double tol, unsigned depth, double* err_acc)
{
    if (!(b > a)) return 0.0;
    cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double c) { return !(c > a && c < b); }), cuts.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double total = 0.0;
    double lo = a;
    for (double c : cuts) {
        total += gk_integrate(f, lo, c, tol, depth, err_acc);
        lo = c;
    }
    total += gk_integrate(f, lo, b, tol, depth, err_acc);
    return total;
}

/// Level-set density of the prefactor-free integrand:
///
///     A(p) = int_{<nu,t> = p} prod e^{-beta_j t_j} h(x) dS / |grad|,
///
/// computed by eliminating a pivot coordinate. The pivot is an unbounded
/// kernel coordinate minimizing beta/nu, so every other kernel coordinate
/// carries the non-negative effective rate beta_k - (beta_piv/nu_piv) nu_k
/// in its slack variable.
class LevelSetIntegrator {
public:
    LevelSetIntegrator(const IntegralSpec& spec, double rel_tol) : spec_(spec), tol_(rel_tol)
    {
        const std::size_t n = spec.dimension();
        range_.resize(n);
        for (std::size_t j = 0; j < n; ++j) range_[j] = spec.range(j);

        std::optional<std::size_t> pivot;
        auto better = [&](std::size_t j, std::size_t k) { return spec.beta[j] / spec.nu[j] < spec.beta[k] / spec.nu[k]; };
        for (std::size_t j = 0; j < n; ++j) {
            if (spec.nu[j] <= 0.0 || range_[j].bounded()) continue;
            if (!pivot || better(j, *pivot)) pivot = j;
        }
        if (!pivot) {
            for (std::size_t j = 0; j < n; ++j) {
                if (spec.nu[j] <= 0.0) continue;
                if (!pivot || better(j, *pivot)) pivot = j;
            }
        }
        pivot_ = *pivot;
        pivot_rate_ = spec.beta[pivot_] / spec.nu[pivot_];

        for (std::size_t j = 0; j < n; ++j) {
            if (spec.nu[j] == 0.0) order_.push_back(j);
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (spec.nu[j] > 0.0 && j != pivot_) order_.push_back(j);
        }
        rate_.assign(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) rate_[j] = spec.beta[j] - pivot_rate_ * spec.nu[j];

        // Capacity (in budget units) of the coordinates after each depth, pivot included.
        capacity_after_.assign(order_.size(), 0.0);
        double cap = spec.nu[pivot_] * range_[pivot_].width();
        for (std::size_t d = order_.size(); d-- > 0;) {
            capacity_after_[d] = cap;
            const std::size_t j = order_[d];
            if (spec.nu[j] > 0.0) cap += spec.nu[j] * range_[j].width();
        }
        total_capacity_ = cap;

        p_min_ = 0.0;
        log_constant_ = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            p_min_ += spec.nu[j] * range_[j].t_min;
            log_constant_ -= spec.beta[j] * range_[j].t_min;
        }

        cuts_.resize(n);
        if (!spec.breakpoints.empty()) {
            for (std::size_t j = 0; j < n; ++j) {
                for (double b : spec.breakpoints[j]) {
                    if (b > range_[j].t_min && b < range_[j].t_max) cuts_[j].push_back(b - range_[j].t_min);
                }
                std::sort(cuts_[j].begin(), cuts_[j].end());
            }
        }
        x_.assign(n, 1.0);
        s_.assign(n, 0.0);
    }

    double p_min() const { return p_min_; }
    std::size_t pivot() const { return pivot_; }

    /// True when some outer (nu = 0) coordinate is unbounded without decay, so
    /// that exhaustions must also truncate it.
    bool needs_outer_truncation() const
    {
        for (std::size_t j : order_) {
            if (spec_.nu[j] == 0.0 && !range_[j].bounded() && spec_.beta[j] <= 0.0) return true;
        }
        return false;
    }

    /// A(p). Unbounded outer coordinates are cut at t <= truncation.
    double density(double p, double truncation = std::numeric_limits<double>::infinity()) const
    {
        const double rem = p - p_min_;
        if (rem < 0.0 || rem > total_capacity_) return 0.0;
        truncation_ = truncation;
        const double inner = integrate_level(0, rem);
        if (inner == 0.0) return 0.0;
        const double log_weight = log_constant_ - pivot_rate_ * rem;
        return std::exp(log_weight) * inner / spec_.nu[pivot_];
    }

private:
    /// int_lo^hi e^{-b s} ds, hi possibly infinite.
    static double exponential_integral(double b, double lo, double hi)
    {
        if (b == 0.0) return hi - lo;
        if (!std::isfinite(hi)) return b > 0.0 ? std::exp(-b * lo) / b : std::numeric_limits<double>::infinity();
        return std::exp(-b * lo) * -std::expm1(-b * (hi - lo)) / b;
    }

    double leaf(double rem) const
    {
        const double s_pivot = rem / spec_.nu[pivot_];
        if (s_pivot > range_[pivot_].width() * (1.0 + 1e-14)) return 0.0;
        s_[pivot_] = s_pivot;
        if (!spec_.smooth_factor) return 1.0;
        for (std::size_t j = 0; j < x_.size(); ++j) x_[j] = std::exp(-(range_[j].t_min + s_[j]));
        return spec_.smooth_factor(std::span<const double>(x_));
    }

    double integrate_level(std::size_t depth, double rem) const
    {
        if (depth == order_.size()) return leaf(rem);
        const std::size_t j = order_[depth];
        const bool kernel = spec_.nu[j] > 0.0;
        const double nu = spec_.nu[j];

        double lo = 0.0;
        double hi = range_[j].width();
        bool budget_limited = false;
        if (kernel) {
            const double by_budget = rem / nu;
            if (by_budget <= hi) {
                hi = by_budget;
                budget_limited = true;
            }
            if (std::isfinite(capacity_after_[depth])) lo = std::max(0.0, (rem - capacity_after_[depth]) / nu);
        } else if (!range_[j].bounded() && std::isfinite(truncation_)) {
            hi = std::max(0.0, truncation_ - range_[j].t_min);
        }
        if (!(hi > lo)) return 0.0;

        // Kinks of the factor in this coordinate, plus kinks of the pivot factor
        // seen through the budget.
        std::vector<double> cuts = cuts_[j];
        if (kernel && depth + 1 == order_.size()) {
            for (double c : cuts_[pivot_]) cuts.push_back((rem - spec_.nu[pivot_] * c) / nu);
        }

        auto inner = [this, depth, j, kernel, nu, rem](double s) {
            const double saved = s_[j];
            s_[j] = s;
            const double v = integrate_level(depth + 1, kernel ? std::max(0.0, rem - nu * s) : rem);
            s_[j] = saved;
            return v;
        };

        const double b = rate_[j];
        if (!spec_.smooth_factor && depth + 1 == order_.size()) {
            // Without a smooth factor the leaf is an indicator that the bounds
            // above already enforce, so only int e^{-b s} ds remains.
            if (!kernel && leaf(rem) == 0.0) return 0.0;
            return exponential_integral(b, lo, hi);
        }
        const unsigned max_depth = 12;
        const double W = kEdgeWidth;

        // Parametrize the top end by the distance d = hi - s so that the
        // remaining budget nu*d is exact even when rem is huge.
        auto top_edge = [&](double width) {
            auto edge = [this, depth, j, nu, hi, b](double d) {
                const double saved = s_[j];
                s_[j] = hi - d;
                const double v = std::exp(-b * (hi - d)) * integrate_level(depth + 1, nu * d);
                s_[j] = saved;
                return v;
            };
            std::vector<double> dcuts;
            for (double c : cuts) dcuts.push_back(hi - c);
            return gk_piecewise(edge, 0.0, width, dcuts, tol_, max_depth, nullptr);
        };

        if (b > 0.0) {
            // The exponential substitution squeezes everything near a budget
            // limit into a sliver of width ~e^{-b(hi-lo)} next to u = U, where
            // the rule never samples; that edge is integrated separately.
            const double top = budget_limited ? std::min(W, hi - lo) : 0.0;
            const double mid = hi - top;
            double total = 0.0;
            if (mid > lo) {
                // s = lo - log1p(-u)/b maps u in [0, U) onto [lo, mid) with e^{-b s} ds = e^{-b lo} du / b.
                const double U = std::isfinite(mid) ? -std::expm1(-b * (mid - lo)) : 1.0;
                auto transformed = [&](double u) { return inner(lo - std::log1p(-u) / b); };
                std::vector<double> ucuts;
                for (double c : cuts) {
                    if (c > lo && c < mid) ucuts.push_back(-std::expm1(-b * (c - lo)));
                }
                total += std::exp(-b * lo) / b * gk_piecewise(transformed, 0.0, U, ucuts, tol_, max_depth, nullptr);
            }
            if (top > 0.0) total += top_edge(top);
            return total;
        }

        if (!std::isfinite(hi)) return std::numeric_limits<double>::infinity();
        auto weighted = [&](double s) { return std::exp(-b * s) * inner(s); };
        if (hi - lo <= 2.0 * W) return gk_piecewise(weighted, lo, hi, cuts, tol_, max_depth, nullptr);

        double total = gk_piecewise(weighted, lo, lo + W, cuts, tol_, max_depth, nullptr);
        total += gk_piecewise(weighted, lo + W, hi - W, cuts, tol_, max_depth, nullptr);
        total += budget_limited ? top_edge(W) : gk_piecewise(weighted, hi - W, hi, cuts, tol_, max_depth, nullptr);
        return total;
    }

    const IntegralSpec& spec_;
    double tol_;
    std::vector<CoordinateRange> range_;
    std::size_t pivot_ = 0;
    double pivot_rate_ = 0.0;
    std::vector<std::size_t> order_;
    std::vector<double> rate_;
    std::vector<double> capacity_after_;
    double total_capacity_ = 0.0;
    double p_min_ = 0.0;
    double log_constant_ = 0.0;
    std::vector<std::vector<double>> cuts_;
    mutable std::vector<double> x_;
    mutable std::vector<double> s_;
    mutable double truncation_ = std::numeric_limits<double>::infinity();
};

/// The lambda-integrand of the residue integral, lambda = ln(1 + p).
struct KernelWeight {
    const IntegralSpec& spec;
    double log_ell;

    /// (1+p)^{1-sigma} (lambda + ln ell)^{-(log_power + eps)}, the factor multiplying A(p) in dlambda.
    double operator()(double lambda) const
    {
        return std::exp((1.0 - spec.sigma) * lambda) * std::pow(lambda + log_ell, -(spec.log_power + spec.eps));
    }
};

struct DetectionOutcome {
    bool divergent = false;
    std::vector<double> partial_sums;
};

/// Exhaustion test: S_i = integral over {<nu,t> <= T_i} (outer coordinates cut
/// at T_i when they do not decay), T_i = 8 * 2^i.
inline DetectionOutcome detect_divergence(const LevelSetIntegrator& level, const IntegralSpec& spec, double tol)
{
    DetectionOutcome out;
    const KernelWeight weight{spec, std::log(spec.ell)};
    const double lambda_min = std::log1p(level.p_min());
    const bool truncate = level.needs_outer_truncation();

    auto piece = [&](double a, double b, double T) {
        auto f = [&](double lambda) { return level.density(std::expm1(lambda), T) * weight(lambda); };
        a = std::max(a, lambda_min);
        if (!(b > a)) return 0.0;
        return spec.prefactor * spec.eps * gk_integrate(f, a, b, tol, 10, nullptr);
    };

    double previous_lambda = lambda_min;
    double running = 0.0;
    double first_positive = 0.0;
    double last_increment = 0.0;
    int stalls = 0;
    int quiet = 0;
    for (int i = 0; i <= kMaxDoublings; ++i) {
        const double T = kDetectionStart * std::ldexp(1.0, i);
        const double lambda_T = std::log1p(T);
        double S;
        if (truncate) {
            S = piece(lambda_min, lambda_T, T);
        } else {
            running += piece(previous_lambda, lambda_T, std::numeric_limits<double>::infinity());
            S = running;
        }
        previous_lambda = std::max(previous_lambda, lambda_T);
        out.partial_sums.push_back(S);
        if (!std::isfinite(S)) {
            out.divergent = true;
            return out;
        }
        if (first_positive == 0.0 && S > 0.0) first_positive = S;
        if (i == 0) continue;

        const double increment = S - out.partial_sums[i - 1];
        if (i >= 2 && increment > 0.9 * last_increment && increment > 1e-300) {
            ++stalls;
        } else {
            stalls = 0;
        }
        last_increment = increment;
        if (stalls >= 4 && first_positive > 0.0 && S > 1e3 * first_positive) {
            out.divergent = true;
            return out;
        }
        quiet = std::abs(increment) <= 1e-14 * std::abs(S) ? quiet + 1 : 0;
        if (quiet >= 2 || (S == 0.0 && i >= 4 && level.p_min() < T)) break;
    }
    return out;
}

/// Deterministic value of the residue integral on level sets.
inline QuadResult level_set_residue(const LevelSetIntegrator& level, const IntegralSpec& spec, const QuadOptions& opt)
{
    QuadResult r;
    r.engine = "level-set";
    const double q = spec.log_power + spec.eps;
    if (q <= 1.0) {
        // The lambda tail int L^{-q} dlambda is infinite.
        r.status = QuadStatus::Divergent;
        r.value = std::numeric_limits<double>::infinity();
        r.abs_error = std::numeric_limits<double>::infinity();
        return r;
    }
    const double log_ell = std::log(spec.ell);
    const KernelWeight weight{spec, log_ell};
    const double lambda_min = std::log1p(level.p_min());
    const double lambda_sat = std::max(30.0, lambda_min + 10.0);
    const double inner_tol = opt.rel_tol * 0.1;

    auto phi = [&](double lambda) {
        const double p = std::expm1(lambda);
        return level.density(p) * std::exp((1.0 - spec.sigma) * lambda);
    };
    auto f = [&](double lambda) { return level.density(std::expm1(lambda)) * weight(lambda); };

    double err = 0.0;
    std::vector<double> cuts;
    for (double d : {1.0, 3.0, 8.0, 16.0}) cuts.push_back(lambda_min + d);
    const double body = gk_piecewise(f, lambda_min, lambda_sat, cuts, inner_tol, 15, &err);

    // Beyond lambda_sat: Phi is frozen at its saturated value and
    // eps * int L^{-q} dlambda = eps L^{1-q} / (q - 1).
    const double phi_sat = phi(lambda_sat);
    const double phi_before = phi(lambda_sat - 1.0);
    const double L_sat = lambda_sat + log_ell;
    const double tail_weight = std::pow(L_sat, 1.0 - q) / (q - 1.0);
    const double tail = phi_sat * tail_weight;
    const double tail_err = std::abs(phi_sat - phi_before) * tail_weight;

    const double raw = spec.eps * body + spec.eps * tail;
    r.value = spec.prefactor * raw;
    r.abs_error = spec.prefactor * (spec.eps * (err + tail_err) + inner_tol * std::abs(raw));
    if (!std::isfinite(r.value)) {
        r.status = QuadStatus::Divergent;
    } else if (r.abs_error <= std::max(opt.rel_tol * std::abs(r.value), opt.abs_tol)) {
        r.status = QuadStatus::Converged;
    } else {
        r.status = QuadStatus::Inconclusive;
    }
    return r;
}

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Importance-sampled residue integral. Decaying coordinates draw from
/// truncated Exp(beta); bounded non-decaying ones uniformly; the unbounded
/// beta = 0 kernel block draws p from the exact density
/// eps (ln ell)^eps / ((1+p) (ln ell(1+p))^{1+eps}) and splits it uniformly
/// over the simplex <nu, s> = p.
inline QuadResult monte_carlo_residue(const IntegralSpec& spec, const QuadOptions& opt)
{
    QuadResult r;
    r.engine = "monte-carlo";
    const std::size_t n = spec.dimension();
    enum class Kind { Block, Exponential, Uniform };
    std::vector<Kind> kind(n);
    std::vector<std::size_t> block;
    for (std::size_t j = 0; j < n; ++j) {
        const auto rg = spec.range(j);
        if (spec.beta[j] > 0.0) {
            kind[j] = Kind::Exponential;
        } else if (rg.bounded()) {
            kind[j] = Kind::Uniform;
        } else if (spec.beta[j] == 0.0 && spec.nu[j] > 0.0) {
            kind[j] = Kind::Block;
            block.push_back(j);
        } else {
            r.status = QuadStatus::Divergent;
            r.value = std::numeric_limits<double>::infinity();
            r.abs_error = r.value;
            return r;
        }
    }
    // Normalizer of the uniform split: the slack simplex {<nu,s> = P} has
    // density P^{r-1} / ((r-1)! prod nu).
    double log_block_norm = 0.0;
    double block_offset = 0.0;
    for (std::size_t i = 0; i < block.size(); ++i) {
        log_block_norm += std::log(spec.nu[block[i]]) + (i > 0 ? std::log(static_cast<double>(i)) : 0.0);
        block_offset += spec.nu[block[i]] * spec.range(block[i]).t_min;
    }
    const double log_ell = std::log(spec.ell);
    const double q = spec.log_power + spec.eps;
    const std::size_t rb = block.size();

    struct Batch {
        double mean = 0.0;
        double m2 = 0.0;
    };
    std::vector<Batch> batches(opt.mc_batches);
    for (std::size_t b = 0; b < opt.mc_batches; ++b) {
        std::mt19937_64 rng(splitmix64(opt.seed ^ splitmix64(b)));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        auto open_unit = [&] {
            double u;
            do u = unif(rng);
            while (u <= 0.0);
            return u;
        };
        std::vector<double> t(n), x(n), w(rb);
        Batch acc;
        for (std::size_t k = 0; k < opt.mc_batch_size; ++k) {
            double log_weight = 0.0;
            double p_rest = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const auto rg = spec.range(j);
                if (kind[j] == Kind::Exponential) {
                    const double beta = spec.beta[j];
                    const double mass = rg.bounded() ? -std::expm1(-beta * rg.width()) : 1.0;
                    t[j] = rg.t_min - std::log1p(-unif(rng) * mass) / beta;
                    if (t[j] > rg.t_max) t[j] = rg.t_max;
                    log_weight += -beta * rg.t_min + std::log(mass / beta);
                } else if (kind[j] == Kind::Uniform) {
                    t[j] = rg.t_min + unif(rng) * rg.width();
                    log_weight += -spec.beta[j] * t[j] + std::log(rg.width());
                }
                if (kind[j] != Kind::Block) p_rest += spec.nu[j] * t[j];
            }

            double kernel_factor;
            if (rb > 0) {
                p_rest += block_offset;
                // Draw L = ln(ell (1+P)) with density eps (ln ell)^eps L^{-1-eps} on [ln ell, inf).
                const double L = log_ell * std::exp(-std::log(open_unit()) / spec.eps);
                const double lambda = L - log_ell;
                const double P = std::expm1(lambda);
                double total = 0.0;
                for (std::size_t i = 0; i < rb; ++i) {
                    w[i] = -std::log(open_unit());
                    total += w[i];
                }
                for (std::size_t i = 0; i < rb; ++i) {
                    const std::size_t j = block[i];
                    t[j] = spec.range(j).t_min + P * (w[i] / total) / spec.nu[j];
                }
                const double log_P = lambda > 1e-8 ? lambda + std::log(-std::expm1(-lambda)) : std::log(P);
                const double lambda_tot = lambda + std::log1p(p_rest * std::exp(-lambda));
                const double L_tot = log_ell + lambda_tot;
                // eps K(P_tot) divided by the proposal density of the block slacks.
                const double log_ratio = (static_cast<double>(rb) - 1.0) * log_P - log_block_norm + lambda -
                                         spec.sigma * lambda_tot + (1.0 + spec.eps) * std::log(L) -
                                         q * std::log(L_tot) - spec.eps * std::log(log_ell);
                kernel_factor = std::exp(log_ratio);
            } else {
                const double lambda_tot = std::log1p(p_rest);
                kernel_factor = spec.eps * std::exp(-spec.sigma * lambda_tot) * std::pow(log_ell + lambda_tot, -q);
            }

            double h = 1.0;
            if (spec.smooth_factor) {
                for (std::size_t j = 0; j < n; ++j) x[j] = std::exp(-t[j]);
                h = spec.smooth_factor(std::span<const double>(x));
            }
            const double sample = spec.prefactor * std::exp(log_weight) * kernel_factor * h;
            const double delta = sample - acc.mean;
            acc.mean += delta / static_cast<double>(k + 1);
            acc.m2 += delta * (sample - acc.mean);
        }
        batches[b] = acc;
    }

    CompensatedSum mean_sum;
    for (const auto& b : batches) mean_sum.add(b.mean);
    const double count = static_cast<double>(opt.mc_batches);
    const double mean = mean_sum.value() / count;
    CompensatedSum var_sum;
    for (const auto& b : batches) {
        const double d = b.mean - mean;
        var_sum.add(d * d);
    }
    const double se = opt.mc_batches > 1 ? std::sqrt(var_sum.value() / (count * (count - 1.0))) : 0.0;
    r.value = mean;
    r.abs_error = se;
    if (!std::isfinite(mean)) {
        r.status = QuadStatus::Divergent;
    } else if (se <= std::max(opt.mc_rel_tol * std::abs(mean), opt.abs_tol)) {
        r.status = QuadStatus::Converged;
    } else {
        r.status = QuadStatus::Inconclusive;
    }
    return r;
}

inline bool prefers_monte_carlo(const IntegralSpec& spec)
{
    const std::size_t n = spec.dimension();
    if (n <= 3) return false;
    std::size_t non_decaying = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (!(spec.beta[j] > 0.0) && !spec.range(j).bounded()) ++non_decaying;
    }
    return non_decaying >= 2;
}

} // namespace detail

/// eps * prefactor * int prod e^{-beta t} h / ((1+<nu,t>)^sigma (ln(ell(1+<nu,t>)))^{1+eps}) dt.
inline QuadResult residue_integral(const IntegralSpec& spec, const QuadOptions& opt = {})
{
    spec.validate();
    if (spec.prefactor == 0.0) return QuadResult{0.0, 0.0, QuadStatus::Converged, {}, "trivial"};

    detail::LevelSetIntegrator level(spec, opt.rel_tol * 0.1);
    std::vector<double> evidence;
    if (opt.detect_divergence) {
        detail::LevelSetIntegrator coarse(spec, opt.detection_tol);
        auto detection = detail::detect_divergence(coarse, spec, opt.detection_tol);
        evidence = std::move(detection.partial_sums);
        if (detection.divergent) {
            QuadResult r;
            r.status = QuadStatus::Divergent;
            r.value = std::numeric_limits<double>::infinity();
            r.abs_error = std::numeric_limits<double>::infinity();
            r.evidence = std::move(evidence);
            r.engine = "exhaustion";
            return r;
        }
    }

    const bool use_mc = opt.engine == QuadEngine::MonteCarlo ||
                        (opt.engine == QuadEngine::Automatic && detail::prefers_monte_carlo(spec));
    QuadResult r = use_mc ? detail::monte_carlo_residue(spec, opt) : detail::level_set_residue(level, spec, opt);
    r.evidence = std::move(evidence);
    return r;
}

/// prefactor * int over { -t_level - 2 < <nu,t> <= -t_level - 1 } of prod e^{-beta t} h dt.
/// Only beta, nu, ranges, breakpoints, smooth_factor and prefactor of the spec are used.
inline QuadResult shell_integral(const IntegralSpec& spec, double t_level, const QuadOptions& opt = {})
{
    if (t_level > -2.0) throw PreconditionError("shell level must be at most -2");
    IntegralSpec s = spec;
    s.eps = 1.0;
    s.ell = std::numbers::e;
    s.validate();
    QuadResult r;
    r.engine = "level-set";
    if (s.prefactor == 0.0) return r;
    detail::LevelSetIntegrator level(s, opt.rel_tol * 0.1);
    const double a = -t_level - 2.0;
    const double b = -t_level - 1.0;
    double err = 0.0;
    auto f = [&](double p) { return level.density(p); };
    std::vector<double> cuts;
    if (level.p_min() > a && level.p_min() < b) cuts.push_back(level.p_min());
    const double v = detail::gk_piecewise(f, a, b, cuts, opt.rel_tol * 0.1, 15, &err);
    r.value = s.prefactor * v;
    r.abs_error = s.prefactor * (err + opt.rel_tol * 0.1 * std::abs(v));
    if (!std::isfinite(r.value)) {
        r.status = QuadStatus::Divergent;
    } else if (r.abs_error > std::max(opt.rel_tol * std::abs(r.value), opt.abs_tol)) {
        r.status = QuadStatus::Inconclusive;
    }
    return r;
}

/// Free coordinate of a restriction integral: int_lo^hi x^power (...) dx with
/// optional interior kink points.
struct FreeCoordinate {
    std::size_t index = 0;
    double lo = 0.0;
    double hi = 1.0;
    double power = 0.0;
    std::vector<double> kinks;
};

/// Data for an integral over a coordinate subspace in the squared moduli of
/// the free coordinates:
///
///     constant * int prod_free x_j^{power_j} * density(x) dx,
///
/// with x_j = 0 on the centre coordinates.
struct RestrictionSpec {
    std::size_t n = 0;
    std::vector<FreeCoordinate> free;
    SmoothFactor density;
    double constant = 1.0;
};

/// Tensor tanh-sinh quadrature (robust against x^power endpoint singularities).
inline double restriction_integral(const RestrictionSpec& spec, double tol = 1e-10)
{
    std::vector<double> x(spec.n, 0.0);
    for (const auto& fc : spec.free) {
        if (fc.lo <= 0.0 && fc.power <= -1.0 && fc.hi > fc.lo) {
            throw PreconditionError("restricted integrand is not integrable at x_" + std::to_string(fc.index + 1) +
                                    " = 0");
        }
    }
    auto eval = [&]() { return spec.density ? spec.density(std::span<const double>(x)) : 1.0; };
    if (spec.free.empty()) return spec.constant * eval();

    boost::math::quadrature::tanh_sinh<double> rule;
    std::function<double(std::size_t)> level = [&](std::size_t d) -> double {
        if (d == spec.free.size()) return eval();
        const auto& fc = spec.free[d];
        if (!(fc.hi > fc.lo)) return 0.0;
        std::vector<double> pts{fc.lo};
        for (double k : fc.kinks) {
            if (k > fc.lo && k < fc.hi) pts.push_back(k);
        }
        pts.push_back(fc.hi);
        std::sort(pts.begin(), pts.end());
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            if (!(pts[i + 1] > pts[i])) continue;
            auto f = [&](double xv) {
                x[fc.index] = xv;
                const double weight = fc.power == 0.0 ? 1.0 : std::pow(xv, fc.power);
                return weight * level(d + 1);
            };
            total += rule.integrate(f, pts[i], pts[i + 1], tol);
        }
        x[fc.index] = 0.0;
        return total;
    };
    return spec.constant * level(0);
}

struct Extrapolation {
    double limit = 0.0;
    double error = 0.0;
    /// Neville table, row i holds T_{i,0..min(i,order)}.
    std::vector<std::vector<double>> table;
};

/// Richardson extrapolation to eps = 0 for samples at eps_0 2^{-i}, assuming
/// value(eps) = L + c_1 eps + c_2 eps^2 + ...
inline Extrapolation extrapolate_to_zero(std::span<const std::pair<double, double>> samples, int order = 3,
                                         double monotone_tol = 1e-3)
{
    if (samples.size() < 4) throw PreconditionError("extrapolation needs at least four samples");
    double scale = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].second)) throw PreconditionError("extrapolation samples must be finite");
        scale = std::max(scale, std::abs(samples[i].second));
        if (i > 0) {
            const double ratio = samples[i - 1].first / samples[i].first;
            if (std::abs(ratio - 2.0) > 1e-9) throw PreconditionError("extrapolation needs eps halving at each step");
        }
    }
    const std::size_t N = samples.size();
    const std::size_t K = std::min<std::size_t>(static_cast<std::size_t>(std::max(order, 0)), N - 1);

    // A tail that changes direction is not in the asymptotic regime. Only the
    // samples feeding the last two extrapolants are checked: coarse eps may
    // legitimately sit before a turning point (e.g. eps * ln(ell)^{-eps}).
    int direction = 0;
    const std::size_t first = N > K + 2 ? N - (K + 2) : 0;
    for (std::size_t i = first + 1; i < N; ++i) {
        const double d = samples[i].second - samples[i - 1].second;
        if (std::abs(d) <= monotone_tol * scale) continue;
        const int sign = d > 0 ? 1 : -1;
        if (direction != 0 && sign != direction) {
            throw PreconditionError("extrapolation samples are not monotone; wrong regime?");
        }
        direction = sign;
    }

    Extrapolation out;
    out.table.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        out.table[i].push_back(samples[i].second);
        for (std::size_t k = 1; k <= std::min(i, K); ++k) {
            const double f = std::ldexp(1.0, static_cast<int>(k));
            out.table[i].push_back((f * out.table[i][k - 1] - out.table[i - 1][k - 1]) / (f - 1.0));
        }
    }
    out.limit = out.table[N - 1][K];
    // With only K + 1 samples the previous row has no order-K entry; compare
    // against the order K - 1 extrapolant instead.
    const double previous = out.table[N - 2].size() > K ? out.table[N - 2][K] : out.table[N - 1][K - 1];
    out.error = std::abs(out.table[N - 1][K] - previous);
    return out;
}

} // namespace resext
