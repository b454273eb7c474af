#pragma once

// Residue functions, residue norms, sigma-lc measures and the Ohsawa measure
// for toric data, assembled from the quadrature module.
//
// A monomial term coef * z^a of a section contributes
//
//     |coef|^2 pi^n e^m  prod_j x_j^{a_j - e_j} e^{-P(x)} dx
//
// to |f|^2 e^{-phi_L - m psi} dV (P is the smooth term of phi_L). In log
// coordinates this is an IntegralSpec with beta_j = a_j + 1 - e_j. Distinct
// monomials are orthogonal after angular integration, so every quantity here
// is a sum over terms.

#include "resext/detail/parallel.hpp"
#include "resext/detail/summation.hpp"
#include "resext/errors.hpp"
#include "resext/ideal_engine.hpp"
#include "resext/quadrature.hpp"
#include "resext/toric_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace resext {

/// A test weight G(x) on the squared moduli together with its support box and
/// the points where it fails to be smooth.
struct TestFunction {
    SmoothFactor value; // empty means identically 1
    std::vector<std::pair<double, double>> support;
    std::vector<std::vector<double>> kinks;
    bool zero = false;

    static TestFunction one() { return {}; }

    static TestFunction from_bump(const BumpFunction& g)
    {
        TestFunction t;
        if (g.is_zero()) {
            t.zero = true;
            return t;
        }
        const std::size_t n = g.dimension();
        t.support.resize(n);
        t.kinks.resize(n);
        bool trivial = true;
        for (std::size_t j = 0; j < n; ++j) {
            t.support[j] = g.support(j);
            if (const auto& f = g.factor(j)) {
                trivial = false;
                for (double k : {f->center - f->radius, f->center - 0.5 * f->radius, f->center + 0.5 * f->radius,
                                 f->center + f->radius}) {
                    if (k > 0.0 && k < 1.0) t.kinks[j].push_back(k);
                }
            }
        }
        if (!trivial) t.value = [g](std::span<const double> x) { return g(x); };
        return t;
    }

    std::pair<double, double> support_of(std::size_t j) const
    {
        return support.empty() ? std::pair<double, double>{0.0, 1.0} : support[j];
    }
    bool reaches_zero(std::size_t j) const { return support_of(j).first <= 0.0; }
    double operator()(std::span<const double> x) const
    {
        if (zero) return 0.0;
        return value ? value(x) : 1.0;
    }
};

enum class ExtensionChoice { ConstantLift, ProofWeighted };

inline const char* to_string(ExtensionChoice c)
{
    return c == ExtensionChoice::ConstantLift ? "constant_lift" : "proof_weighted";
}

inline std::vector<double> default_eps_grid(int levels = 11)
{
    std::vector<double> grid;
    for (int i = 0; i < levels; ++i) grid.push_back(std::ldexp(1.0, -i));
    return grid;
}

struct ResidueOptions {
    QuadOptions quad;
    std::vector<double> eps_grid = default_eps_grid();
    int richardson_order = 3;
    /// Relative tolerance for identities (lc = Ohsawa, path (i) = path (ii), ...).
    double identity_tol = 1e-3;
    std::vector<double> shell_levels = {-20.0, -25.0, -30.0, -35.0};
    /// Log power of the kernel; 1 except in negative-control tests.
    double log_power = 1.0;
};

enum class ResidueClass { DivergesAllEps, FiniteResidueNorm, VanishingLimit };

inline const char* to_string(ResidueClass c)
{
    switch (c) {
    case ResidueClass::DivergesAllEps: return "diverges_all_eps";
    case ResidueClass::FiniteResidueNorm: return "finite_residue_norm";
    case ResidueClass::VanishingLimit: return "vanishing_limit";
    }
    return "unknown";
}

struct ResidueSample {
    double eps = 0.0;
    double value = 0.0;
    double error = 0.0;
    QuadStatus status = QuadStatus::Converged;
};

struct ResidueReport {
    int sigma = 1;
    double ell = std::numbers::e;
    std::vector<ResidueSample> samples;
    ResidueClass classification = ResidueClass::FiniteResidueNorm;
    /// (value, error) of the extrapolated limit, absent when divergent.
    std::optional<std::pair<double, double>> residue_norm;
};

namespace detail {

/// IntegralSpec of one monomial term weighted by G.
inline IntegralSpec term_spec(const ToricData& data, const Exponent& a, double weight, int sigma, double eps,
                              double ell, const TestFunction& G, double log_power)
{
    const std::size_t n = data.n;
    IntegralSpec s;
    s.beta.resize(n);
    s.nu.resize(n);
    s.ranges.resize(n);
    s.breakpoints.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        s.beta[j] = to_double(Rational(a[j] + 1) - data.exponent(j));
        s.nu[j] = to_double(data.nu[j]);
        const auto [lo, hi] = G.support_of(j);
        s.ranges[j] = CoordinateRange::from_support(lo, hi);
        if (!G.kinks.empty()) {
            for (double k : G.kinks[j]) s.breakpoints[j].push_back(-std::log(k));
        }
    }
    s.sigma = sigma;
    s.eps = eps;
    s.ell = ell;
    s.log_power = log_power;
    const bool has_smooth = !data.smooth_term.is_zero();
    if (has_smooth || G.value) {
        s.smooth_factor = [P = data.smooth_term, G, has_smooth](std::span<const double> x) {
            double v = G.value ? G.value(x) : 1.0;
            if (has_smooth) v *= std::exp(-P(x));
            return v;
        };
    }
    s.prefactor = G.zero ? 0.0 : std::pow(std::numbers::pi, static_cast<double>(n)) * std::exp(to_double(data.m)) * weight;
    return s;
}

/// Local form of f in I(phi_L + m_{k-1} psi): every coordinate whose x-support
/// reaches 0 must be integrable, with equality allowed only along nu_j > 0.
inline void check_section_precondition(const ToricData& data, const MonomialSection& f, const TestFunction& G)
{
    for (const auto& [a, coef] : f.terms()) {
        if (a.size() != data.n) throw PreconditionError("section has wrong dimension");
        for (std::size_t j = 0; j < data.n; ++j) {
            if (!G.reaches_zero(j)) continue;
            const Rational beta = Rational(a[j] + 1) - data.exponent(j);
            if (beta < 0 || (beta == 0 && data.nu[j] == 0)) {
                throw PreconditionError("section term is outside I(phi_L + m_{k-1} psi) along z_" + std::to_string(j + 1) +
                                        " = 0");
            }
        }
    }
}

inline QuadResult combine(const std::vector<QuadResult>& parts)
{
    QuadResult out;
    out.engine = parts.empty() ? "trivial" : parts.front().engine;
    std::vector<double> values, errors;
    for (const auto& p : parts) {
        values.push_back(p.value);
        errors.push_back(p.abs_error);
        if (p.status == QuadStatus::Divergent) {
            if (out.status != QuadStatus::Divergent) out.evidence = p.evidence;
            out.status = QuadStatus::Divergent;
        } else if (p.status == QuadStatus::Inconclusive && out.status == QuadStatus::Converged) {
            out.status = QuadStatus::Inconclusive;
        }
    }
    out.value = stable_sum(values);
    out.abs_error = stable_sum(errors);
    if (out.status == QuadStatus::Divergent) {
        out.value = std::numeric_limits<double>::infinity();
        out.abs_error = std::numeric_limits<double>::infinity();
    }
    return out;
}

inline void check_residue_arguments(int sigma, double eps, double ell)
{
    if (sigma < 1) throw PreconditionError("residue functions need sigma >= 1");
    if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
    if (!(ell >= std::numbers::e * (1.0 - 1e-12))) throw PreconditionError("ell must be at least e");
}

/// Weighted extension of a test function g on the centre {z_j = 0}:
/// g-hat = g * e^{P(x) - P(x|_{x_j=0})} * profile_j(x) / nu_j, which agrees
/// with g on the centre and differs from the constant lift off it.
inline TestFunction weighted_extension(const ToricData& data, const TestFunction& g, std::size_t j)
{
    const AdmissibilityProfile profile = admissibility_profile(data, j);
    const double nu = to_double(profile.value_on_divisor());
    TestFunction out = g;
    out.value = [g, profile, nu, j, P = data.smooth_term](std::span<const double> x) {
        std::vector<double> on_centre(x.begin(), x.end());
        on_centre[j] = 0.0;
        const double ratio = std::exp(P(x) - P(std::span<const double>(on_centre)));
        return g(x) * ratio * profile(x) / nu;
    };
    return out;
}

/// Coordinates of a term that carry the log pole on supp G: beta_j = 0,
/// nu_j > 0 and the support reaches x_j = 0.
inline std::vector<std::size_t> effective_equality_set(const ToricData& data, const Exponent& a, const TestFunction& G)
{
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < data.n; ++j) {
        if (data.nu[j] > 0 && G.reaches_zero(j) && Rational(a[j] + 1) == data.exponent(j)) out.push_back(j);
    }
    return out;
}

inline double factorial(int k)
{
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

} // namespace detail

/// R_{G|f|^2}(eps) of index sigma.
inline QuadResult residue_function(const ToricData& data, const MonomialSection& f, int sigma, double eps,
                                   double ell = std::numbers::e, const TestFunction& G = TestFunction::one(),
                                   const ResidueOptions& opt = {})
{
    data.validate();
    detail::check_residue_arguments(sigma, eps, ell);
    detail::check_section_precondition(data, f, G);
    std::vector<QuadResult> parts;
    for (const auto& [a, coef] : f.terms()) {
        const IntegralSpec spec = detail::term_spec(data, a, std::norm(coef), sigma, eps, ell, G, opt.log_power);
        parts.push_back(residue_integral(spec, opt.quad));
    }
    return detail::combine(parts);
}

namespace detail {

/// Samples an eps-grid (divergence-first: the three coarsest points decide
/// DivergesAllEps before the rest is computed) and extrapolates.
template <class SampleFn>
ResidueReport residue_sweep(int sigma, double ell, const ResidueOptions& opt, SampleFn&& sample)
{
    ResidueReport report;
    report.sigma = sigma;
    report.ell = ell;
    const auto& grid = opt.eps_grid;
    if (grid.size() < 4) throw PreconditionError("eps grid needs at least four points");

    const std::size_t head = std::min<std::size_t>(3, grid.size());
    auto first = parallel_map<QuadResult>(head, [&](std::size_t i) { return sample(grid[i]); });
    const bool all_divergent =
        std::all_of(first.begin(), first.end(), [](const QuadResult& r) { return r.status == QuadStatus::Divergent; });
    std::vector<QuadResult> results = std::move(first);
    if (!all_divergent) {
        auto rest = parallel_map<QuadResult>(grid.size() - head, [&](std::size_t i) { return sample(grid[head + i]); });
        for (auto& r : rest) results.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < results.size(); ++i) {
        report.samples.push_back({grid[i], results[i].value, results[i].abs_error, results[i].status});
    }
    if (all_divergent) {
        report.classification = ResidueClass::DivergesAllEps;
        return report;
    }
    for (const auto& s : report.samples) {
        if (s.status == QuadStatus::Divergent) {
            throw CrossCheckError("residue function diverges for eps = " + std::to_string(s.eps) +
                                  " but not for all eps");
        }
        if (s.status == QuadStatus::Inconclusive) {
            throw InconclusiveError("residue function inconclusive at eps = " + std::to_string(s.eps));
        }
    }
    std::vector<std::pair<double, double>> pts;
    double scale = 0.0;
    for (const auto& s : report.samples) {
        pts.emplace_back(s.eps, s.value);
        scale = std::max(scale, std::abs(s.value));
    }
    const Extrapolation ex = extrapolate_to_zero(pts, opt.richardson_order, opt.identity_tol);
    report.residue_norm = std::make_pair(ex.limit, ex.error);
    report.classification = std::abs(ex.limit) <= opt.identity_tol * scale ? ResidueClass::VanishingLimit
                                                                           : ResidueClass::FiniteResidueNorm;
    return report;
}

} // namespace detail

inline ResidueReport residue_norm(const ToricData& data, const MonomialSection& f, int sigma,
                                  double ell = std::numbers::e, const TestFunction& G = TestFunction::one(),
                                  const ResidueOptions& opt = {})
{
    detail::check_residue_arguments(sigma, 1.0, ell);
    detail::check_section_precondition(data, f, G);
    return detail::residue_sweep(sigma, ell, opt, [&](double eps) { return residue_function(data, f, sigma, eps, ell, G, opt); });
}

/// Value of a residue report at eps = 0: the extrapolated norm, 0 for a
/// vanishing limit, +inf when divergent.
inline double norm_value(const ResidueReport& r)
{
    if (r.classification == ResidueClass::DivergesAllEps) return std::numeric_limits<double>::infinity();
    if (r.classification == ResidueClass::VanishingLimit) return 0.0;
    return r.residue_norm->first;
}

/// z^a in A_sigma decided by finiteness of R_{|z^a|^2}(eps) on a small eps grid.
/// sigma = 0 has no residue function and is answered combinatorially.
inline bool analytic_membership(const ToricData& data, const Exponent& a, int sigma,
                                const std::vector<double>& eps_grid = {1.0, 0.5, 0.25}, const QuadOptions& quad = {})
{
    if (sigma < 0) throw PreconditionError("sigma must be nonnegative");
    if (sigma == 0) return combinatorial_membership(data, a, 0);
    for (double eps : eps_grid) {
        const IntegralSpec spec = detail::term_spec(data, a, 1.0, sigma, eps, std::numbers::e, TestFunction::one(), 1.0);
        const QuadResult r = residue_integral(spec, quad);
        if (r.status == QuadStatus::Divergent) return false;
        if (r.status == QuadStatus::Inconclusive) {
            throw InconclusiveError("membership integral inconclusive at eps = " + std::to_string(eps));
        }
    }
    return true;
}

struct MeasureValue {
    double value = 0.0;
    double error = 0.0;
    /// The same quantity computed on the centre by restriction.
    double restriction = 0.0;
    ResidueReport report;
};

/// Density of the sigma-lc measure on the centre, integrated against G:
/// sum over terms whose pole set on supp G has exactly sigma elements of
/// (1/(sigma-1)!) prod_{pole}(pi/nu_j) * int_free G |coef|^2 e^m prod pi x^{a-e} e^{-P} dx.
inline double lc_restriction(const ToricData& data, const MonomialSection& f, const TestFunction& G, int sigma)
{
    if (G.zero) return 0.0;
    std::vector<double> parts;
    for (const auto& [a, coef] : f.terms()) {
        const auto pole = detail::effective_equality_set(data, a, G);
        if (static_cast<int>(pole.size()) < sigma) continue;
        if (static_cast<int>(pole.size()) > sigma) return std::numeric_limits<double>::infinity();
        RestrictionSpec rs;
        rs.n = data.n;
        double constant = std::norm(coef) * std::exp(to_double(data.m)) / detail::factorial(sigma - 1);
        for (std::size_t j = 0; j < data.n; ++j) {
            if (std::binary_search(pole.begin(), pole.end(), j)) {
                constant *= std::numbers::pi / to_double(data.nu[j]);
                continue;
            }
            FreeCoordinate fc;
            fc.index = j;
            std::tie(fc.lo, fc.hi) = G.support_of(j);
            fc.power = to_double(Rational(a[j]) - data.exponent(j));
            if (!G.kinks.empty()) fc.kinks = G.kinks[j];
            constant *= std::numbers::pi;
            rs.free.push_back(fc);
        }
        rs.constant = constant;
        const bool has_smooth = !data.smooth_term.is_zero();
        rs.density = [G, P = data.smooth_term, has_smooth](std::span<const double> x) {
            return G(x) * (has_smooth ? std::exp(-P(x)) : 1.0);
        };
        parts.push_back(restriction_integral(rs));
    }
    return detail::stable_sum(parts);
}

/// int g |f|^2 dV_sigma by extrapolation (path i), cross-checked against the
/// restriction to the centre (path ii).
inline MeasureValue lc_measure_norm(const ToricData& data, const MonomialSection& f, const TestFunction& g, int sigma,
                                    const ResidueOptions& opt = {})
{
    MeasureValue out;
    out.restriction = lc_restriction(data, f, g, sigma);
    if (g.zero) return out;
    out.report = residue_norm(data, f, sigma, std::numbers::e, g, opt);
    if (out.report.classification == ResidueClass::DivergesAllEps) {
        out.value = std::numeric_limits<double>::infinity();
        out.error = std::numeric_limits<double>::infinity();
    } else {
        out.value = norm_value(out.report);
        out.error = out.report.residue_norm->second;
    }
    const double scale = std::max(std::abs(out.restriction), std::abs(out.value));
    const bool both_infinite = std::isinf(out.value) && std::isinf(out.restriction);
    if (!both_infinite && !(std::abs(out.value - out.restriction) <= opt.identity_tol * scale + 1e-12)) {
        throw CrossCheckError("lc measure: extrapolation gives " + std::to_string(out.value) + ", restriction gives " +
                              std::to_string(out.restriction));
    }
    return out;
}

struct OhsawaValue {
    double value = 0.0;
    double error = 0.0;
    std::vector<std::pair<double, double>> shells;
    bool stabilized = true;
};

/// lim_{t -> -inf} int_{t < psi < t+1} g-hat |f|^2 e^{-phi_L - m psi}, read off
/// the last shell of opt.shell_levels.
inline OhsawaValue ohsawa_norm(const ToricData& data, const MonomialSection& f, const TestFunction& g,
                               ExtensionChoice choice, const ResidueOptions& opt = {})
{
    data.validate();
    if (opt.shell_levels.size() < 2) throw PreconditionError("need at least two shell levels");
    TestFunction G = g;
    if (choice == ExtensionChoice::ProofWeighted && !g.zero) {
        const auto relevant = relevant_indices(data);
        std::optional<std::size_t> axis;
        for (std::size_t j : relevant) {
            if (g.reaches_zero(j)) {
                if (axis) throw PreconditionError("weighted extension needs g on a single 1-lc centre");
                axis = j;
            }
        }
        if (!axis) throw PreconditionError("g does not meet any relevant divisor");
        G = detail::weighted_extension(data, g, *axis);
    }
    OhsawaValue out;
    for (double t : opt.shell_levels) {
        std::vector<QuadResult> parts;
        for (const auto& [a, coef] : f.terms()) {
            const IntegralSpec spec = detail::term_spec(data, a, std::norm(coef), 1, 1.0, std::numbers::e, G, 1.0);
            parts.push_back(shell_integral(spec, t, opt.quad));
        }
        const QuadResult r = detail::combine(parts);
        if (r.status == QuadStatus::Inconclusive) {
            throw InconclusiveError("shell integral inconclusive at t = " + std::to_string(t));
        }
        out.shells.emplace_back(t, r.value);
    }
    const double last = out.shells.back().second;
    const double prev = out.shells[out.shells.size() - 2].second;
    out.value = last;
    out.error = std::abs(last - prev);
    out.stabilized = std::isfinite(last) && out.error <= opt.identity_tol * std::abs(last) + 1e-12;
    return out;
}

struct MeasureReport {
    double lc_norm = 0.0;
    double lc_error = 0.0;
    double lc_restriction = 0.0;
    double ohsawa_norm = 0.0;
    double ohsawa_error = 0.0;
    double ohsawa_weighted = 0.0;
    std::vector<std::pair<double, double>> shells;
    std::vector<std::pair<double, double>> shells_weighted;
    double discrepancy = 0.0;
    double extension_discrepancy = 0.0;
    bool pass = false;
    std::string message;
};

/// Compares the 1-lc measure with the Ohsawa measure (two extensions of g).
/// Never throws; failures are reported in the result.
inline MeasureReport verify_prop_1lc_equals_ohsawa(const ToricData& data, const MonomialSection& f,
                                                   const TestFunction& g, const ResidueOptions& opt = {})
{
    MeasureReport rep;
    auto relative = [](double a, double b) {
        const double scale = std::max(std::abs(a), std::abs(b));
        if (std::isinf(a) || std::isinf(b)) return std::numeric_limits<double>::infinity();
        return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
    };
    try {
        // Path (i) alone here: the restriction value is reported, not enforced,
        // so that a perturbed kernel shows up as a discrepancy instead of an exception.
        rep.lc_restriction = lc_restriction(data, f, g, 1);
        const ResidueReport lc = residue_norm(data, f, 1, std::numbers::e, g, opt);
        rep.lc_norm = norm_value(lc);
        rep.lc_error = lc.residue_norm ? lc.residue_norm->second : std::numeric_limits<double>::infinity();

        const OhsawaValue oh = ohsawa_norm(data, f, g, ExtensionChoice::ConstantLift, opt);
        const OhsawaValue ow = ohsawa_norm(data, f, g, ExtensionChoice::ProofWeighted, opt);
        rep.ohsawa_norm = oh.value;
        rep.ohsawa_error = oh.error;
        rep.ohsawa_weighted = ow.value;
        rep.shells = oh.shells;
        rep.shells_weighted = ow.shells;
        rep.discrepancy = relative(rep.lc_norm, rep.ohsawa_norm);
        rep.extension_discrepancy = relative(rep.ohsawa_norm, rep.ohsawa_weighted);
        const double path_gap = relative(rep.lc_norm, rep.lc_restriction);
        rep.pass = oh.stabilized && ow.stabilized && rep.discrepancy <= opt.identity_tol &&
                   rep.extension_discrepancy <= opt.identity_tol && path_gap <= opt.identity_tol;
        if (!rep.pass) {
            rep.message = "lc " + std::to_string(rep.lc_norm) + " vs ohsawa " + std::to_string(rep.ohsawa_norm) +
                          " (weighted " + std::to_string(rep.ohsawa_weighted) + ", restriction " +
                          std::to_string(rep.lc_restriction) + ")";
        }
    } catch (const std::exception& e) {
        rep.pass = false;
        rep.message = e.what();
    }
    return rep;
}

struct RegimeRow {
    int s = 0;
    ResidueReport report;
    /// (1/(sigma-1)!) int G|_{x_1 = ... = x_sigma = 0}, the predicted limit at s = sigma.
    double expected = 0.0;
};

/// The real model on [0,1]^n with psi = sum_{j <= sigma} log x_j - 1:
/// R(eps)(s) = eps int G dx / (x_1...x_sigma |psi|^s (log e|psi|)^{1+eps}).
inline IntegralSpec model_spec(int sigma, std::size_t n, int s, const BumpFunction& G, double eps,
                               double ell = std::numbers::e)
{
    if (sigma < 1 || static_cast<std::size_t>(sigma) > n) throw PreconditionError("model needs 1 <= sigma <= n");
    if (G.dimension() != n) throw PreconditionError("test function has wrong dimension");
    const TestFunction T = TestFunction::from_bump(G);
    IntegralSpec spec;
    spec.beta.resize(n);
    spec.nu.resize(n);
    spec.ranges.resize(n);
    spec.breakpoints.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const bool pole = j < static_cast<std::size_t>(sigma);
        spec.beta[j] = pole ? 0.0 : 1.0;
        spec.nu[j] = pole ? 1.0 : 0.0;
        const auto [lo, hi] = T.support_of(j);
        spec.ranges[j] = CoordinateRange::from_support(lo, hi);
        if (!T.kinks.empty()) {
            for (double k : T.kinks[j]) spec.breakpoints[j].push_back(-std::log(k));
        }
    }
    spec.sigma = s;
    spec.eps = eps;
    spec.ell = ell;
    spec.smooth_factor = T.value;
    spec.prefactor = T.zero ? 0.0 : 1.0;
    return spec;
}

/// (1/(sigma-1)!) int G(0, ..., 0, x_{sigma+1}, ..., x_n) dx by tanh-sinh.
inline double model_expected_limit(int sigma, const BumpFunction& G)
{
    const TestFunction T = TestFunction::from_bump(G);
    if (T.zero) return 0.0;
    RestrictionSpec rs;
    rs.n = G.dimension();
    for (std::size_t j = static_cast<std::size_t>(sigma); j < rs.n; ++j) {
        FreeCoordinate fc;
        fc.index = j;
        std::tie(fc.lo, fc.hi) = T.support_of(j);
        if (!T.kinks.empty()) fc.kinks = T.kinks[j];
        rs.free.push_back(fc);
    }
    rs.density = [T](std::span<const double> x) { return T(x); };
    rs.constant = 1.0 / detail::factorial(sigma - 1);
    return restriction_integral(rs);
}

inline RegimeRow regime_classify(int sigma, std::size_t n, int s, const BumpFunction& G, const ResidueOptions& opt = {})
{
    RegimeRow row;
    row.s = s;
    row.expected = model_expected_limit(sigma, G);
    row.report = detail::residue_sweep(s, std::numbers::e, opt, [&](double eps) {
        return residue_integral(model_spec(sigma, n, s, G, eps), opt.quad);
    });
    return row;
}

struct EllIndependence {
    std::vector<double> ells;
    std::vector<ResidueReport> reports;
    double max_deviation = 0.0;
    bool pass = false;
};

inline EllIndependence ell_independence(const ToricData& data, const MonomialSection& f, int sigma,
                                        std::vector<double> ells = {std::numbers::e, 10.0, 100.0},
                                        const TestFunction& G = TestFunction::one(), const ResidueOptions& opt = {})
{
    EllIndependence out;
    out.ells = std::move(ells);
    for (double ell : out.ells) out.reports.push_back(residue_norm(data, f, sigma, ell, G, opt));
    std::vector<double> norms;
    for (const auto& r : out.reports) norms.push_back(norm_value(r));
    double scale = 0.0;
    for (double v : norms) scale = std::max(scale, std::abs(v));
    double dev = 0.0;
    for (std::size_t i = 0; i < norms.size(); ++i) {
        for (std::size_t k = i + 1; k < norms.size(); ++k) dev = std::max(dev, std::abs(norms[i] - norms[k]));
    }
    out.max_deviation = scale > 0.0 ? dev / scale : 0.0;
    out.pass = std::isfinite(scale) && out.max_deviation <= opt.identity_tol;
    return out;
}

} // namespace resext
