#include "resext/extension_engine.hpp"
#include "resext/presets.hpp"
#include "resext/random_data.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace resext;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

Rational q(long long p, long long d = 1) { return Rational(p, d); }

ExtensionOptions loose()
{
    ExtensionOptions o;
    o.residue.quad.rel_tol = 1e-6;
    return o;
}

PotentialDecomposition decomposition(const ToricData& d) { return decompose_potential(d, jumping_numbers(d, 0, d.m)); }

MonomialSection restrict_to(const MonomialSection& F, const std::vector<std::size_t>& centre)
{
    return F.restricted(centre);
}

} // namespace

TEST(ConstantExtension, BoxCentreExamples)
{
    const auto box = preset("box2").data;
    const std::vector<std::size_t> centre{0};
    const auto F = constant_extension(box, MonomialSection::monomial({0, 0}), centre);
    EXPECT_EQ(F, MonomialSection::monomial({0, 0}));
    EXPECT_EQ(restrict_to(F, centre), MonomialSection::monomial({0, 0}));
    EXPECT_TRUE(combinatorial_membership(box, {0, 0}, 2));

    const auto G = constant_extension(box, MonomialSection::monomial({0, 1}), centre);
    EXPECT_EQ(G, MonomialSection::monomial({0, 1}));
    EXPECT_TRUE(combinatorial_membership(box, {0, 1}, 1));
}

TEST(ConstantExtension, FillsCanonicalSectionFactor)
{
    // e = (2, 1, 1): the lift carries z1^{s0_1} = z1 on the centre {z1 = z2 = 0}.
    const auto d = ToricData::make({1, 0, 0}, {1, 1, 1}, 1);
    const std::vector<std::size_t> centre{0, 1};
    const auto F = constant_extension(d, MonomialSection::monomial({0, 0, 1}), centre);
    EXPECT_EQ(F, MonomialSection::monomial({1, 0, 1}));
    EXPECT_TRUE(combinatorial_membership(d, {1, 0, 1}, 2));
    EXPECT_EQ(equality_set(d, {1, 0, 1}), centre);
}

TEST(ConstantExtension, RejectsInvalidCentres)
{
    const auto d = ToricData::make({q(1, 2), 0}, {1, 1}, q(3, 2));
    const std::vector<std::size_t> irrelevant{1}, relevant{0};
    EXPECT_THROW(constant_extension(d, MonomialSection::monomial({0, 0}), irrelevant), PreconditionError);
    EXPECT_THROW(constant_extension(d, MonomialSection::monomial({1, 0}), relevant), PreconditionError);
}

TEST(BphiBound, DiagonalIsZero)
{
    for (const char* name : {"calib1d", "box2", "prop2d", "model-sigma2"}) {
        const auto p = preset(name);
        const auto lc = lc_structure(p.data);
        for (std::size_t s = 1; s <= lc.sigma_mlc; ++s) EXPECT_EQ(bphi_bound_constant(decomposition(p.data), lc, s), 0.0) << name;
    }
}

TEST(BphiBound, SmoothTermBothSigns)
{
    // +x1/10: restricting to x1 = 0 only lowers bphi, so C = 0.
    const auto up = preset("box2-smooth").data;
    EXPECT_NEAR(bphi_bound_constant(decomposition(up), lc_structure(up), 1), 0.0, 1e-12);
    // -x1/10: the restriction exceeds bphi by up to 1/10 at x1 = 1.
    const auto down = preset("box2-smooth-neg").data;
    EXPECT_NEAR(bphi_bound_constant(decomposition(down), lc_structure(down), 1), 0.1, 1e-10);
}

TEST(PolynomialSup, BracketsGridMaximum)
{
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> num(-6, 6), expo(0, 3);
    const int N = 200;
    for (int trial = 0; trial < 8; ++trial) {
        std::map<Exponent, Rational> terms;
        for (int k = 0; k < 4; ++k) terms[{expo(rng), expo(rng)}] += q(num(rng), 5);
        const Polynomial D(terms);
        double lip = 0.0, grid = -std::numeric_limits<double>::infinity();
        for (const auto& [a, c] : D.terms()) lip += std::abs(to_double(c)) * (a[0] + a[1]);
        for (int i = 0; i <= N; ++i) {
            for (int k = 0; k <= N; ++k) {
                const std::vector<double> x{static_cast<double>(i) / N, static_cast<double>(k) / N};
                grid = std::max(grid, D(x));
            }
        }
        const double sup = detail::polynomial_sup(D, 2);
        EXPECT_GE(sup, grid - 1e-12) << trial;
        EXPECT_LE(sup, grid + lip / N + 1e-9) << trial;
    }
}

TEST(ExtendWithEstimate, CalibrationClosedForm)
{
    const auto p = preset("calib1d");
    const auto st = extend_with_estimate(p.data, p.f, 1);
    EXPECT_TRUE(st.pass);
    EXPECT_TRUE(st.congruence_ok);
    EXPECT_EQ(st.F, p.f);
    EXPECT_EQ(st.C, 0.0);
    EXPECT_NEAR(st.rf0, kPi * kE, 1e-6 * kPi * kE);
    for (const auto& row : st.rows) {
        EXPECT_NEAR(row.lhs, kPi * kE, 1e-6 * kPi * kE);
        EXPECT_NEAR(row.rhs, 2.0 * kPi * kE, 1e-5);
        EXPECT_TRUE(row.ok);
    }
    EXPECT_EQ(st.rows.size(), 4u);
}

TEST(ExtendWithEstimate, OriginCentreOfBox)
{
    const auto p = preset("box2");
    const auto st = extend_with_estimate(p.data, MonomialSection::monomial({0, 0}), 2, loose());
    EXPECT_TRUE(st.pass);
    EXPECT_EQ(st.C, 0.0);
    EXPECT_EQ(st.centre, (std::vector<std::size_t>{0, 1}));
    EXPECT_NEAR(st.rf0, st.rf0_restriction, 1e-3 * st.rf0);
    for (const auto& row : st.rows) EXPECT_LE(row.lhs, 2.0 * st.rf0 * (1.0 + 1e-3));
}

TEST(ExtendWithEstimate, SmoothTermUsesStatedConstant)
{
    const auto p = preset("box2-smooth-neg");
    const auto st = extend_with_estimate(p.data, MonomialSection::monomial({0, 1}), 1, loose());
    EXPECT_TRUE(st.pass);
    EXPECT_NEAR(st.C, 0.1, 1e-10);
    for (const auto& row : st.rows) EXPECT_NEAR(row.rhs, 2.0 * std::exp(0.1) * st.rf0, 1e-9 * row.rhs);
}

TEST(ExtendWithEstimate, RejectsClassOutsideStage)
{
    const auto p = preset("box2");
    EXPECT_THROW(extend_with_estimate(p.data, MonomialSection::monomial({1, 1}), 1), PreconditionError);
    EXPECT_THROW(extend_with_estimate(p.data, MonomialSection::monomial({0, 0}), 1), PreconditionError);
    MonomialSection two_centres = MonomialSection::monomial({1, 0});
    two_centres.add({0, 1}, 1.0);
    EXPECT_THROW(extend_with_estimate(p.data, two_centres, 1), PreconditionError);
}

TEST(IteratedExtension, OnePlusZ1OnBox)
{
    const auto p = preset("box2");
    const auto r = iterated_extension(p.data, p.f, loose());
    EXPECT_TRUE(r.pass);
    EXPECT_TRUE(r.congruence_ok);
    ASSERT_EQ(r.stages.size(), 2u);
    EXPECT_EQ(r.stages[0].sigma, 2);
    EXPECT_EQ(r.stages[0].f, MonomialSection::monomial({0, 0}));
    EXPECT_EQ(r.stages[1].sigma, 1);
    EXPECT_EQ(r.stages[1].f, MonomialSection::monomial({1, 0}));
    const auto a0 = multiplier_ideal(p.data, p.data.m);
    EXPECT_EQ(a0, MonomialIdeal::principal({1, 1}));
    for (const auto& [a, c] : (r.F - p.f).terms()) EXPECT_TRUE(a0.contains(a));
}

TEST(IteratedExtension, TrivialAndSingleStage)
{
    const auto p = preset("box2");
    const auto trivial = iterated_extension(p.data, MonomialSection::monomial({1, 1}));
    EXPECT_TRUE(trivial.stages.empty());
    EXPECT_TRUE(trivial.F.is_zero());
    EXPECT_TRUE(trivial.congruence_ok);

    const auto single = iterated_extension(p.data, MonomialSection::monomial({1, 0}), loose());
    ASSERT_EQ(single.stages.size(), 1u);
    EXPECT_EQ(single.stages[0].sigma, 1);
    EXPECT_TRUE(single.pass);
}

// Smooth terms with nonnegative coefficients are non-decreasing in each x_j,
// so restricting to a centre can only lower bphi: pointwise on a grid, and C = 0.
TEST(MeanValue, MonotoneSmoothTermsGiveZeroConstant)
{
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> num(0, 5), expo(0, 2);
    for (int trial = 0; trial < 20; ++trial) {
        std::map<Exponent, Rational> terms;
        for (int k = 0; k < 3; ++k) terms[{expo(rng), expo(rng)}] += q(num(rng), 10);
        const Polynomial P(terms);
        const auto d = ToricData::make({0, 0}, {1, 1}, 1, P);
        const std::vector<std::size_t> centre{0};
        const Polynomial on_centre = P.restricted(centre);
        for (int i = 0; i <= 20; ++i) {
            for (int k = 0; k <= 20; ++k) {
                const std::vector<double> x{i / 20.0, k / 20.0};
                EXPECT_LE(on_centre(x), P(x) + 1e-15);
            }
        }
        EXPECT_LE(bphi_bound_constant(decomposition(d), lc_structure(d), 1), 1e-12) << trial;
    }
}

// Exact part of every stage on random data: the lift of each class agrees
// with it modulo the previous adjoint ideal and stays on its centre.
TEST(ConstantExtension, CongruenceOnRandomData)
{
    std::mt19937_64 rng(99);
    RandomDataOptions opt;
    opt.max_n = 3;
    for (int k = 0; k < 50; ++k) {
        const ToricData d = random_toric_data(rng, opt);
        const auto jumps = jumping_numbers(d, 0, d.m);
        const auto lc = lc_structure(d);
        int bound = 1;
        for (std::size_t j = 0; j < d.n; ++j) bound = std::max(bound, static_cast<int>(to_ll(floor(d.exponent(j)))) + 1);
        Exponent a(d.n, 0);
        int checked = 0;
        while (true) {
            const auto eq = equality_set(d, a);
            const std::size_t sigma = eq.size();
            if (sigma >= 1 && combinatorial_membership(d, a, sigma)) {
                Exponent off = a;
                for (std::size_t j : eq) off[j] = 0;
                const auto F = constant_extension(d, MonomialSection::monomial(off), eq);
                const auto previous = adjoint_ideal(d, jumps, sigma - 1);
                for (const auto& [b, c] : (F - MonomialSection::monomial(a)).terms()) {
                    EXPECT_TRUE(previous.contains(b)) << "config " << k;
                }
                ++checked;
            }
            std::size_t j = 0;
            while (j < d.n && ++a[j] > bound) a[j++] = 0;
            if (j == d.n) break;
        }
        EXPECT_GT(checked, 0) << "config " << k << " sigma_mlc " << lc.sigma_mlc;
    }
}
