#include "resext/ideal_engine.hpp"
#include "resext/random_data.hpp"
#include "resext/toric_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace resext;

namespace {

Rational q(long long p, long long d = 1) { return Rational(p, d); }

} // namespace

TEST(EvalPsi, BoundaryValue)
{
    const auto d = ToricData::make({0}, {1}, 1);
    const std::vector<double> x{1.0};
    EXPECT_DOUBLE_EQ(eval_psi(d, x), -1.0);
}

TEST(EvalPsi, LogArithmetic)
{
    const auto d2 = ToricData::make({0, 0}, {1, 1}, 1);
    const std::vector<double> x2{std::exp(-2.0), std::exp(-3.0)};
    EXPECT_NEAR(eval_psi(d2, x2), -6.0, 1e-14);

    const auto d1 = ToricData::make({0}, {q(1, 2)}, 1);
    const std::vector<double> x1{std::exp(-4.0)};
    EXPECT_NEAR(eval_psi(d1, x1), -3.0, 1e-14);
}

TEST(EvalPsi, PoleIsMinusInfinity)
{
    const auto d = ToricData::make({0, 0}, {1, 0}, 1);
    const std::vector<double> x{0.0, 0.5};
    EXPECT_EQ(eval_psi(d, x), -std::numeric_limits<double>::infinity());
}

TEST(ToricData, RejectsInvalidInput)
{
    EXPECT_THROW(ToricData::make({}, {}, 0), PreconditionError);
    EXPECT_THROW(ToricData::make({0}, {0}, 0), PreconditionError);
    EXPECT_THROW(ToricData::make({q(-1)}, {1}, 0), PreconditionError);
    EXPECT_THROW(ToricData::make({0}, {1}, q(-1, 2)), PreconditionError);
    EXPECT_THROW(ToricData::make({0, 0}, {1}, 0), PreconditionError);
}

TEST(DecomposePotential, OneDimensional)
{
    const auto d = ToricData::make({0}, {1}, 1);
    const auto pd = decompose_potential(d, jumping_numbers(d, 0, 1));
    EXPECT_EQ(pd.relevant, std::vector<std::size_t>{0});
    EXPECT_EQ(pd.s0, std::vector<Rational>{q(0)});
    EXPECT_EQ(pd.bphi_exponents, std::vector<Rational>{q(0)});
    EXPECT_TRUE(pd.reconstructs(d));
}

TEST(DecomposePotential, MixedExponents)
{
    const auto d = ToricData::make({q(1, 2), 0}, {1, 1}, q(3, 2));
    const auto pd = decompose_potential(d, jumping_numbers(d, 0, q(3, 2)));
    EXPECT_EQ(pd.relevant, std::vector<std::size_t>{0});
    EXPECT_EQ(pd.s0, (std::vector<Rational>{q(1), q(0)}));
    EXPECT_EQ(pd.bphi_exponents, (std::vector<Rational>{q(0), q(3, 2)}));
    EXPECT_TRUE(pd.reconstructs(d));
}

TEST(DecomposePotential, TwoRelevantDivisors)
{
    const auto d = ToricData::make({0, 0}, {1, 1}, 2);
    const auto pd = decompose_potential(d, jumping_numbers(d, 0, 2));
    EXPECT_EQ(pd.relevant, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(pd.s0, (std::vector<Rational>{q(1), q(1)}));
    EXPECT_EQ(pd.bphi_exponents, (std::vector<Rational>{q(0), q(0)}));
    EXPECT_TRUE(pd.reconstructs(d));
}

TEST(DecomposePotential, RejectsNonJump)
{
    const auto d = ToricData::make({0}, {1}, q(1, 2));
    EXPECT_THROW(decompose_potential(d, jumping_numbers(d, 0, 1)), NotAJumpError);
}

TEST(DecomposePotential, ReconstructionOnRandomData)
{
    std::mt19937_64 rng(7);
    RandomDataOptions opt;
    opt.max_n = 4;
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    for (int k = 0; k < 200; ++k) {
        ToricData d = random_toric_data(rng, opt);
        if (k % 3 == 0) d.smooth_term = Polynomial::monomial(Exponent(d.n, 1), q(1, 7));
        const auto pd = decompose_potential(d, jumping_numbers(d, 0, d.m));
        ASSERT_TRUE(pd.reconstructs(d)) << "config " << k;
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> x(d.n);
            for (auto& v : x) v = unit(rng);
            const double direct = eval_weight_potential(d, x);
            EXPECT_NEAR(eval_decomposed_potential(pd, x), direct, 1e-12 * (1.0 + std::abs(direct)));
        }
    }
}

TEST(AdmissibilityProfile, DiagonalIsConstant)
{
    const auto d1 = ToricData::make({0}, {1}, 1);
    const auto p1 = admissibility_profile(d1, 0);
    const std::vector<double> x{0.3};
    EXPECT_DOUBLE_EQ(p1(x), 1.0);

    const auto d2 = ToricData::make({0, 0}, {q(1, 2), 2}, 1);
    const auto p2 = admissibility_profile(d2, 1);
    const std::vector<double> y{0.1, 0.9};
    EXPECT_DOUBLE_EQ(p2(y), 2.0);
    EXPECT_EQ(p2.value_on_divisor(), q(2));
}

TEST(AdmissibilityProfile, SmoothPerturbation)
{
    const auto d = ToricData::make({0}, {1}, 1, Polynomial::monomial({1}, q(1, 10)));
    const auto p = admissibility_profile(d, 0);
    for (double x : {0.0, 0.25, 0.5, 1.0}) {
        const std::vector<double> pt{x};
        EXPECT_NEAR(p(pt), 1.0 + x / 10.0, 1e-15);
        EXPECT_GT(p(pt), 0.0);
    }
}

TEST(AdmissibilityProfile, NonPositiveThrows)
{
    const auto d = ToricData::make({0}, {1}, 1, Polynomial::monomial({1}, q(-2)));
    EXPECT_THROW(admissibility_profile(d, 0), PositivityError);
    EXPECT_THROW(admissibility_profile(ToricData::make({0, 0}, {1, 0}, 1), 1), PreconditionError);
}

TEST(Polynomial, LogDerivativeAndRestriction)
{
    Polynomial p(std::map<Exponent, Rational>{{{2, 1}, q(3)}, {{0, 1}, q(1, 2)}});
    const auto d0 = p.log_derivative(0);
    EXPECT_EQ(d0, Polynomial::monomial({2, 1}, q(6)));
    const std::vector<std::size_t> first{0};
    EXPECT_EQ(p.restricted(first), Polynomial::monomial({0, 1}, q(1, 2)));
    const std::vector<double> x{0.5, 0.25};
    EXPECT_NEAR(p(x), 3 * 0.25 * 0.25 + 0.125, 1e-15);
}

TEST(BumpFunction, ProfileIsC2Smoothstep)
{
    EXPECT_DOUBLE_EQ(BumpFunction::profile(0.0), 1.0);
    EXPECT_DOUBLE_EQ(BumpFunction::profile(0.5), 1.0);
    EXPECT_DOUBLE_EQ(BumpFunction::profile(1.0), 0.0);
    EXPECT_NEAR(BumpFunction::profile(0.75), 0.5, 1e-15);
    // One-sided difference quotients of first and second derivatives vanish at the joins.
    const double h = 1e-4;
    for (double s : {0.5, 1.0}) {
        const double d1 = (BumpFunction::profile(s + h) - BumpFunction::profile(s - h)) / (2 * h);
        EXPECT_NEAR(d1, 0.0, 1e-6);
    }
}

TEST(BumpFunction, SupportAndValidation)
{
    const auto g = BumpFunction::on_centre({0}, {0.0, 0.5}, 0.25, 0.2);
    EXPECT_EQ(g.support(0), (std::pair<double, double>{0.0, 1.0}));
    EXPECT_EQ(g.support(1), (std::pair<double, double>{0.25, 0.75}));
    const std::vector<double> inside{0.9, 0.5}, outside{0.1, 0.8};
    EXPECT_DOUBLE_EQ(g(inside), 1.0);
    EXPECT_DOUBLE_EQ(g(outside), 0.0);
    const std::vector<std::size_t> divisors{0, 1};
    EXPECT_TRUE(g.respects_margin(divisors));
    EXPECT_THROW(BumpFunction::separable({BumpFactor{0.5, 0.6}}), PreconditionError);
    EXPECT_TRUE(BumpFunction::zero(2).is_zero());
}

// |f|^2 averaged over the torus (theta_j uniform) equals the sum of the
// squared moduli of its terms: the cross terms z^a conj(z^b) average to 0.
TEST(MonomialSection, TorusOrthogonality)
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> expo(0, 3);
    std::uniform_real_distribution<double> coef(-2.0, 2.0), radius(0.2, 0.95);
    const int steps = 16; // exact for trigonometric polynomials of degree < 16
    for (int trial = 0; trial < 20; ++trial) {
        MonomialSection f(2);
        for (int k = 0; k < 4; ++k) f.add({expo(rng), expo(rng)}, {coef(rng), coef(rng)});
        const double r1 = radius(rng), r2 = radius(rng);
        double mean = 0.0;
        for (int i = 0; i < steps; ++i) {
            for (int k = 0; k < steps; ++k) {
                const double th1 = 2 * std::numbers::pi * i / steps, th2 = 2 * std::numbers::pi * k / steps;
                const std::vector<std::complex<double>> z{std::polar(r1, th1), std::polar(r2, th2)};
                mean += std::norm(f(z));
            }
        }
        mean /= steps * steps;
        double diagonal = 0.0;
        for (const auto& [a, c] : f.terms()) diagonal += std::norm(c) * std::pow(r1, 2 * a[0]) * std::pow(r2, 2 * a[1]);
        EXPECT_NEAR(mean, diagonal, 1e-12 * (1.0 + diagonal));
    }
}

TEST(MonomialSection, Arithmetic)
{
    MonomialSection f = MonomialSection::monomial({0, 0});
    f.add({1, 0}, 1.0);
    const auto g = f - MonomialSection::monomial({0, 0});
    EXPECT_EQ(g, MonomialSection::monomial({1, 0}));
    const std::vector<std::size_t> first{0};
    EXPECT_EQ(f.restricted(first), MonomialSection::monomial({0, 0}));
    EXPECT_TRUE((f - f).is_zero());
    EXPECT_THROW(f.add({1}, 1.0), PreconditionError);
}
