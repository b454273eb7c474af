#pragma once

// Extensions of sections from sigma-lc centres with the local L^2 estimate
// R_F(eps) <= 2 e^C R_f(0), and the stage-by-stage extension through the
// adjoint filtration A_{sigma_mlc} > ... > A_0.

#include "resext/errors.hpp"
#include "resext/ideal_engine.hpp"
#include "resext/residue_analysis.hpp"
#include "resext/toric_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <string>
#include <vector>

namespace resext {

/// pr^* f on the centre T, multiplied by the canonical section prod_{j in T} z_j^{s0_j}
/// so that it represents a germ in A_sigma. `f` must not involve the T coordinates.
inline MonomialSection constant_extension(const ToricData& data, const MonomialSection& f,
                                          const std::vector<std::size_t>& centre)
{
    const auto relevant = relevant_indices(data);
    for (std::size_t j : centre) {
        if (!std::binary_search(relevant.begin(), relevant.end(), j)) {
            throw PreconditionError("z_" + std::to_string(j + 1) + " = 0 is not a relevant divisor");
        }
    }
    MonomialSection F(data.n);
    for (const auto& [a, coef] : f.terms()) {
        Exponent lifted = a;
        for (std::size_t j : centre) {
            if (a[j] != 0) throw PreconditionError("section on the centre must not depend on z_" + std::to_string(j + 1));
            lifted[j] = static_cast<int>(to_ll(floor(data.exponent(j) - 1)));
        }
        F.add(std::move(lifted), coef);
    }
    return F;
}

namespace detail {

/// Certified upper bound for sup_{[0,1]^n} D by branch and bound. Each box is
/// bounded by the smaller of a Lipschitz estimate (constants sum |coef| a_j)
/// and a monomial-wise corner estimate.
inline double polynomial_sup(const Polynomial& D, std::size_t n, double tol = 1e-12, std::size_t max_boxes = 200000)
{
    if (D.is_zero()) return 0.0;
    std::vector<double> lip(n, 0.0);
    for (const auto& [a, coef] : D.terms()) {
        for (std::size_t j = 0; j < n; ++j) lip[j] += std::abs(to_double(coef)) * a[j];
    }
    struct Box {
        std::vector<double> lo, hi;
        double centre_value = 0.0;
        double upper = 0.0;
    };
    auto make = [&](std::vector<double> lo, std::vector<double> hi) {
        Box b{std::move(lo), std::move(hi), 0.0, 0.0};
        std::vector<double> c(n);
        double slack = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            c[j] = 0.5 * (b.lo[j] + b.hi[j]);
            slack += lip[j] * 0.5 * (b.hi[j] - b.lo[j]);
        }
        // Feasible values: centre and the two extreme corners.
        b.centre_value = std::max({D(std::span<const double>(c)), D(std::span<const double>(b.lo)),
                                   D(std::span<const double>(b.hi))});
        // On x >= 0 each monomial is monotone in every coordinate, so its sup on
        // the box sits at the lo or hi corner; the sum of those is exact for
        // single-signed D and settles plateaus the Lipschitz bound cannot.
        double corner = 0.0;
        for (const auto& [a, coef] : D.terms()) {
            const double k = to_double(coef);
            double at = 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (a[j] != 0) at *= std::pow(k > 0 ? b.hi[j] : b.lo[j], a[j]);
            }
            corner += k * at;
        }
        b.upper = std::min(std::max(b.centre_value, D(std::span<const double>(c)) + slack), corner);
        return b;
    };
    auto cmp = [](const Box& x, const Box& y) { return x.upper < y.upper; };
    std::priority_queue<Box, std::vector<Box>, decltype(cmp)> queue(cmp);
    queue.push(make(std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)));
    double best = queue.top().centre_value;
    for (std::size_t iter = 0; iter < max_boxes; ++iter) {
        Box top = queue.top();
        if (top.upper <= best + tol) return top.upper;
        queue.pop();
        std::size_t axis = 0;
        for (std::size_t j = 1; j < n; ++j) {
            if (lip[j] * (top.hi[j] - top.lo[j]) > lip[axis] * (top.hi[axis] - top.lo[axis])) axis = j;
        }
        const double mid = 0.5 * (top.lo[axis] + top.hi[axis]);
        auto left_hi = top.hi;
        left_hi[axis] = mid;
        auto right_lo = top.lo;
        right_lo[axis] = mid;
        for (Box child : {make(top.lo, left_hi), make(right_lo, top.hi)}) {
            best = std::max(best, child.centre_value);
            queue.push(std::move(child));
        }
    }
    return queue.top().upper;
}

} // namespace detail

/// C = max over sigma-centres T of sup (bphi|_T - bphi), at least 0. Only the
/// smooth part of bphi contributes because its diagonal exponents vanish on
/// the relevant divisors.
inline double bphi_bound_constant(const PotentialDecomposition& decomp, const LcStructure& lc, std::size_t sigma)
{
    double C = 0.0;
    for (const auto& centre : lc.centres(sigma)) {
        for (std::size_t j : centre) {
            if (decomp.bphi_exponents[j] != 0) {
                throw PreconditionError("bphi has a pole along the centre; the difference is unbounded");
            }
        }
        const Polynomial D = decomp.bphi_smooth.restricted(centre) - decomp.bphi_smooth;
        C = std::max(C, detail::polynomial_sup(D, lc.n));
    }
    return C;
}

struct EstimateRow {
    int stage_sigma = 0;
    /// 0 marks the extrapolated row at eps = 0+.
    double eps = 0.0;
    double lhs = 0.0;
    double lhs_error = 0.0;
    double rhs = 0.0;
    bool ok = false;
};

struct ExtensionStage {
    int sigma = 0;
    std::vector<std::size_t> centre;
    MonomialSection f;
    MonomialSection F;
    double C = 0.0;
    /// R_f(0) by extrapolation and by restriction to the centre.
    double rf0 = 0.0;
    double rf0_restriction = 0.0;
    std::vector<EstimateRow> rows;
    bool congruence_ok = false;
    bool pass = false;
};

struct ExtensionResult {
    MonomialSection F;
    std::vector<ExtensionStage> stages;
    double C = 0.0;
    bool congruence_ok = false;
    bool pass = false;

    std::vector<MonomialSection> stage_sections() const
    {
        std::vector<MonomialSection> out;
        for (const auto& s : stages) out.push_back(s.F);
        return out;
    }
    std::vector<EstimateRow> estimate_table() const
    {
        std::vector<EstimateRow> out;
        for (const auto& s : stages) out.insert(out.end(), s.rows.begin(), s.rows.end());
        return out;
    }
};

struct ExtensionOptions {
    ResidueOptions residue;
    std::vector<double> estimate_eps = {1.0, 0.5, 0.25};
};

namespace detail {

inline JumpSchedule schedule_up_to(const ToricData& data)
{
    if (data.m <= 0) throw NotAJumpError("m = 0 is not a jumping number");
    return jumping_numbers(data, Rational(0), data.m);
}

inline bool section_in(const MonomialSection& s, const MonomialIdeal& ideal)
{
    for (const auto& [a, coef] : s.terms()) {
        if (!ideal.contains(a)) return false;
    }
    return true;
}

} // namespace detail

/// Extends a class in A_sigma / A_{sigma-1} living on one sigma-centre and
/// checks R_F(eps) <= 2 e^C R_f(0) on the sampled eps values.
inline ExtensionStage extend_with_estimate(const ToricData& data, const MonomialSection& f, int sigma,
                                           const ExtensionOptions& opt = {})
{
    data.validate();
    if (sigma < 1) throw PreconditionError("extension needs sigma >= 1");
    if (f.is_zero()) throw PreconditionError("nothing to extend: f = 0");
    const LcStructure lc = lc_structure(data);
    const JumpSchedule jumps = detail::schedule_up_to(data);

    ExtensionStage stage;
    stage.sigma = sigma;
    stage.f = f;
    std::optional<std::vector<std::size_t>> centre;
    for (const auto& [a, coef] : f.terms()) {
        if (a.size() != data.n) throw PreconditionError("section has wrong dimension");
        const auto eq = equality_set(data, a);
        if (static_cast<int>(eq.size()) != sigma || !combinatorial_membership(data, a, sigma)) {
            throw PreconditionError("every term must lie in A_" + std::to_string(sigma) + " with an equality set of size " +
                                    std::to_string(sigma));
        }
        if (centre && *centre != eq) throw PreconditionError("terms live on different centres");
        centre = eq;
    }
    stage.centre = *centre;

    MonomialSection on_centre(data.n);
    for (const auto& [a, coef] : f.terms()) {
        Exponent b = a;
        for (std::size_t j : stage.centre) b[j] = 0;
        on_centre.add(std::move(b), coef);
    }
    stage.F = constant_extension(data, on_centre, stage.centre);

    const MonomialIdeal target = adjoint_ideal(data, jumps, static_cast<std::size_t>(sigma - 1));
    stage.congruence_ok = detail::section_in(stage.F - f, target);

    stage.C = bphi_bound_constant(decompose_potential(data, jumps), lc, static_cast<std::size_t>(sigma));
    const MeasureValue rf = lc_measure_norm(data, f, TestFunction::one(), sigma, opt.residue);
    stage.rf0 = rf.value;
    stage.rf0_restriction = rf.restriction;
    const double rhs = 2.0 * std::exp(stage.C) * stage.rf0;
    const double slack = 1.0 + opt.residue.identity_tol;

    EstimateRow zero_row;
    zero_row.stage_sigma = sigma;
    if (stage.F == f) {
        zero_row.lhs = rf.value;
        zero_row.lhs_error = rf.error;
    } else {
        const ResidueReport r = residue_norm(data, stage.F, sigma, std::numbers::e, TestFunction::one(), opt.residue);
        zero_row.lhs = norm_value(r);
        zero_row.lhs_error = r.residue_norm ? r.residue_norm->second : std::numeric_limits<double>::infinity();
    }
    zero_row.rhs = rhs;
    zero_row.ok = zero_row.lhs <= rhs * slack;
    stage.rows.push_back(zero_row);

    auto sampled = detail::parallel_map<QuadResult>(opt.estimate_eps.size(), [&](std::size_t i) {
        return residue_function(data, stage.F, sigma, opt.estimate_eps[i], std::numbers::e, TestFunction::one(),
                                opt.residue);
    });
    for (std::size_t i = 0; i < sampled.size(); ++i) {
        EstimateRow row;
        row.stage_sigma = sigma;
        row.eps = opt.estimate_eps[i];
        row.lhs = sampled[i].value;
        row.lhs_error = sampled[i].abs_error;
        row.rhs = rhs;
        row.ok = sampled[i].converged() && row.lhs <= rhs * slack;
        stage.rows.push_back(row);
    }
    stage.pass = stage.congruence_ok &&
                 std::all_of(stage.rows.begin(), stage.rows.end(), [](const EstimateRow& r) { return r.ok; });
    return stage;
}

/// Single-stage result in the common report shape.
inline ExtensionResult extend_single(const ToricData& data, const MonomialSection& f, int sigma,
                                     const ExtensionOptions& opt = {})
{
    ExtensionResult out;
    out.stages.push_back(extend_with_estimate(data, f, sigma, opt));
    out.F = out.stages.back().F;
    out.C = out.stages.back().C;
    out.congruence_ok = out.stages.back().congruence_ok;
    out.pass = out.stages.back().pass;
    return out;
}

/// Peels f through A_{sigma_mlc} > ... > A_1, extending the part with
/// equality-set size sigma at stage sigma. Terms already in A_0 are dropped;
/// the result satisfies F = f mod A_0.
inline ExtensionResult iterated_extension(const ToricData& data, const MonomialSection& f,
                                          const ExtensionOptions& opt = {})
{
    data.validate();
    const LcStructure lc = lc_structure(data);
    const MonomialIdeal a0 = multiplier_ideal(data, data.m);

    std::map<std::vector<std::size_t>, MonomialSection> by_centre;
    for (const auto& [a, coef] : f.terms()) {
        if (!combinatorial_membership(data, a, lc.sigma_mlc)) {
            throw PreconditionError("f must lie in I(phi_L + m_{k-1} psi)");
        }
        auto eq = equality_set(data, a);
        if (eq.empty()) continue;
        auto [it, inserted] = by_centre.try_emplace(eq, MonomialSection(data.n));
        it->second.add(a, coef);
    }

    ExtensionResult out;
    out.F = MonomialSection(data.n);
    for (std::size_t sigma = lc.sigma_mlc; sigma >= 1; --sigma) {
        for (const auto& [centre, part] : by_centre) {
            if (centre.size() != sigma) continue;
            ExtensionStage stage;
            try {
                stage = extend_with_estimate(data, part, static_cast<int>(sigma), opt);
            } catch (const std::exception& e) {
                throw std::runtime_error("stage sigma = " + std::to_string(sigma) + ": " + e.what());
            }
            out.F = out.F + stage.F;
            out.C = std::max(out.C, stage.C);
            out.stages.push_back(std::move(stage));
        }
    }
    out.congruence_ok = detail::section_in(out.F - f, a0);
    out.pass = out.congruence_ok &&
               std::all_of(out.stages.begin(), out.stages.end(), [](const ExtensionStage& s) { return s.pass; });
    return out;
}

} // namespace resext
