#include "resext/quadrature.hpp"
#include "resext/toric_model.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace resext;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

IntegralSpec kernel_spec(std::vector<double> beta, std::vector<double> nu, int sigma, double eps)
{
    IntegralSpec s;
    s.beta = std::move(beta);
    s.nu = std::move(nu);
    s.sigma = sigma;
    s.eps = eps;
    return s;
}

// Independent reference for the all-ones, beta = 0 family with sigma = n.
// The level set <1,t> = p of the orthant has volume p^{n-1}/(n-1)! per dp;
// substituting w = 1 + ln(1+p) turns the kernel into w^{-1-eps} dw, and
// eps * int_1^inf w^{-1-eps} dw = 1 leaves an exponentially decaying remainder.
double simplex_oracle(int n, double eps)
{
    double fact = 1.0;
    for (int k = 2; k < n; ++k) fact *= k;
    auto remainder = [&](double v) {
        const double w = 1.0 + v;
        return (1.0 - std::pow(-std::expm1(-v), n - 1)) * std::pow(w, -1.0 - eps);
    };
    boost::math::quadrature::exp_sinh<double> rule;
    return (1.0 - eps * rule.integrate(remainder, 0.0, std::numeric_limits<double>::infinity(), 1e-13)) / fact;
}

} // namespace

TEST(ResidueIntegral, KernelCalibrationClosedForm)
{
    for (double nu : {1.0, 2.0, 1.0 / 3.0}) {
        for (int i = 0; i <= 10; ++i) {
            auto s = kernel_spec({0.0}, {nu}, 1, std::ldexp(1.0, -i));
            s.prefactor = kPi * kE;
            const auto r = residue_integral(s);
            ASSERT_TRUE(r.converged());
            EXPECT_NEAR(r.value, kPi * kE / nu, 1e-8 * kPi * kE / nu) << "nu " << nu << " eps 2^-" << i;
        }
    }
}

TEST(ResidueIntegral, DecayingCoordinateMatchesExpSinh)
{
    boost::math::quadrature::exp_sinh<double> rule;
    double previous = std::numeric_limits<double>::infinity();
    for (double eps : {1.0, 0.5, 0.25, 1.0 / 64, 1.0 / 1024}) {
        const auto r = residue_integral(kernel_spec({1.0}, {1.0}, 1, eps));
        ASSERT_TRUE(r.converged());
        auto f = [eps](double t) { return std::exp(-t) / ((1.0 + t) * std::pow(1.0 + std::log1p(t), 1.0 + eps)); };
        const double oracle = eps * rule.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
        EXPECT_NEAR(r.value, oracle, 1e-8 * oracle) << "eps " << eps;
        EXPECT_LT(r.value, previous);
        previous = r.value;
    }
    EXPECT_LT(previous, 1e-3);
}

TEST(ResidueIntegral, AllDecayingIsFiniteAndVanishes)
{
    for (const auto& beta : std::vector<std::vector<double>>{{0.5, 1.0}, {2.0, 0.25, 1.0}}) {
        const std::vector<double> nu(beta.size(), 1.0);
        const double v1 = residue_integral(kernel_spec(beta, nu, 1, 1.0)).value;
        const auto small = residue_integral(kernel_spec(beta, nu, 1, 1.0 / 1024));
        ASSERT_TRUE(small.converged());
        EXPECT_TRUE(std::isfinite(v1));
        EXPECT_LT(small.value, v1 / 100.0);
    }
}

TEST(ResidueIntegral, TwoRelevantAtIndexOneDiverges)
{
    for (double eps : {1.0, 0.5, 0.25}) {
        const auto r = residue_integral(kernel_spec({0.0, 0.0}, {1.0, 1.0}, 1, eps));
        EXPECT_EQ(r.status, QuadStatus::Divergent) << "eps " << eps;
        EXPECT_GE(r.evidence.size(), 4u);
    }
}

TEST(ResidueIntegral, LogPowerAtMostOneDiverges)
{
    auto s = kernel_spec({0.0}, {1.0}, 1, 0.25);
    s.log_power = 0.5;
    EXPECT_EQ(residue_integral(s).status, QuadStatus::Divergent);
}

TEST(ResidueIntegral, SimplexFamilyMatchesOneDimensionalOracle)
{
    for (double eps : {1.0, 0.25, 1.0 / 1024}) {
        const auto r2 = residue_integral(kernel_spec({0.0, 0.0}, {1.0, 1.0}, 2, eps));
        ASSERT_TRUE(r2.converged());
        EXPECT_NEAR(r2.value, simplex_oracle(2, eps), 1e-8 * r2.value) << "n=2 eps " << eps;
    }
    const auto r3 = residue_integral(kernel_spec({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, 3, 0.5));
    ASSERT_TRUE(r3.converged());
    EXPECT_NEAR(r3.value, simplex_oracle(3, 0.5), 1e-8 * r3.value);
}

TEST(ResidueIntegral, MonteCarloAgreesWithinThreeStandardErrors)
{
    QuadOptions mc;
    mc.engine = QuadEngine::MonteCarlo;
    for (const auto& s : {kernel_spec({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, 3, 0.5), kernel_spec({0.0, 0.0}, {1.0, 1.0}, 2, 0.5),
                          kernel_spec({1.0}, {1.0}, 1, 1.0), kernel_spec({0.0, 0.5}, {1.0, 2.0}, 1, 0.5)}) {
        const auto det = residue_integral(s);
        const auto sampled = residue_integral(s, mc);
        ASSERT_TRUE(det.converged());
        ASSERT_TRUE(sampled.converged());
        EXPECT_NEAR(sampled.value, det.value, 3.0 * std::hypot(sampled.abs_error, det.abs_error));
        EXPECT_GT(sampled.abs_error, 0.0);
    }
}

TEST(ResidueIntegral, RepeatedRunsAreBitIdentical)
{
    QuadOptions mc;
    mc.engine = QuadEngine::MonteCarlo;
    const auto s = kernel_spec({0.0, 0.0}, {1.0, 1.0}, 2, 0.5);
    EXPECT_EQ(residue_integral(s, mc).value, residue_integral(s, mc).value);
    EXPECT_EQ(residue_integral(s).value, residue_integral(s).value);
    QuadOptions other = mc;
    other.seed = 42;
    EXPECT_NE(residue_integral(s, other).value, residue_integral(s, mc).value);
}

TEST(ResidueIntegral, RejectsInvalidSpec)
{
    EXPECT_THROW(residue_integral(kernel_spec({0.0}, {1.0}, 1, 0.0)), PreconditionError);
    auto s = kernel_spec({0.0}, {1.0}, 1, 0.5);
    s.ell = 2.0;
    EXPECT_THROW(residue_integral(s), PreconditionError);
    EXPECT_THROW(residue_integral(kernel_spec({0.0}, {0.0}, 1, 0.5)), PreconditionError);
}

TEST(ShellIntegral, OneDimensionalUnitSlab)
{
    auto s = kernel_spec({0.0}, {1.0}, 1, 1.0);
    s.prefactor = kPi * kE;
    for (double t : {-20.0, -25.0, -30.0, -35.0}) EXPECT_NEAR(shell_integral(s, t).value, kPi * kE, 1e-10);
}

TEST(ShellIntegral, DecayKillsDeepShells)
{
    const auto r = shell_integral(kernel_spec({1.0}, {1.0}, 1, 1.0), -30.0);
    EXPECT_GE(r.value, 0.0);
    EXPECT_LE(r.value, std::exp(-28.0));
}

TEST(ShellIntegral, TwoDimensionalSlabArea)
{
    auto s = kernel_spec({0.0, 0.0}, {1.0, 1.0}, 1, 1.0);
    s.prefactor = kPi * kPi * kE;
    const double area = (29.0 * 29.0 - 28.0 * 28.0) / 2.0;
    EXPECT_NEAR(shell_integral(s, -30.0).value, kPi * kPi * kE * area, 1e-8 * kPi * kPi * kE * area);
    EXPECT_THROW(shell_integral(s, -1.0), PreconditionError);
}

TEST(ShellIntegral, StabilizesForDeepLevels)
{
    auto s = kernel_spec({0.0, 1.5}, {1.0, 1.0}, 1, 1.0);
    double previous = shell_integral(s, -25.0).value;
    for (double t : {-30.0, -35.0}) {
        const double v = shell_integral(s, t).value;
        EXPECT_NEAR(v, previous, 1e-8 * std::abs(v));
        previous = v;
    }
    EXPECT_NEAR(previous, 1.0 / 1.5, 1e-8);
}

TEST(RestrictionIntegral, PointEvaluation)
{
    RestrictionSpec spec;
    spec.n = 1;
    spec.constant = kE;
    EXPECT_DOUBLE_EQ(restriction_integral(spec), kE);
}

TEST(RestrictionIntegral, ZeroDensity)
{
    RestrictionSpec spec;
    spec.n = 2;
    spec.free = {FreeCoordinate{1, 0.0, 1.0, 0.0, {}}};
    spec.density = [](std::span<const double>) { return 0.0; };
    EXPECT_EQ(restriction_integral(spec), 0.0);
}

TEST(RestrictionIntegral, RadialBumpAgainstSimpson)
{
    const double m = 1.5, radius = 0.5;
    RestrictionSpec spec;
    spec.n = 2;
    spec.free = {FreeCoordinate{1, 0.0, radius, 0.0, {radius / 2}}};
    spec.density = [&](std::span<const double> x) {
        EXPECT_EQ(x[0], 0.0);
        return BumpFunction::profile(x[1] / radius);
    };
    spec.constant = std::exp(m);

    const int N = 20000;
    const double h = radius / N;
    double simpson = 0.0;
    for (int i = 0; i <= N; ++i) {
        const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        simpson += w * BumpFunction::profile(i * h / radius);
    }
    simpson *= h / 3.0 * std::exp(m);
    EXPECT_NEAR(restriction_integral(spec), simpson, 1e-9 * simpson);
}

TEST(RestrictionIntegral, RejectsNonIntegrablePower)
{
    RestrictionSpec spec;
    spec.n = 2;
    spec.free = {FreeCoordinate{1, 0.0, 1.0, -1.0, {}}};
    EXPECT_THROW(restriction_integral(spec), PreconditionError);
}

TEST(Extrapolation, ConstantSequence)
{
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i < 6; ++i) samples.emplace_back(std::ldexp(1.0, -i), kPi * kE);
    const auto x = extrapolate_to_zero(samples);
    EXPECT_DOUBLE_EQ(x.limit, kPi * kE);
    EXPECT_EQ(x.error, 0.0);
}

TEST(Extrapolation, LinearModel)
{
    const std::vector<std::pair<double, double>> samples{{1.0, 1.5}, {0.5, 1.25}, {0.25, 1.125}, {0.125, 1.0625}};
    const auto x = extrapolate_to_zero(samples);
    EXPECT_NEAR(x.limit, 1.0, 1e-15);
    EXPECT_LE(x.error, 1e-15);
}

TEST(Extrapolation, ProportionalToEpsGoesToZero)
{
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i < 8; ++i) {
        const double eps = std::ldexp(1.0, -i);
        samples.emplace_back(eps, 0.7 * eps + 0.1 * eps * eps);
    }
    EXPECT_NEAR(extrapolate_to_zero(samples).limit, 0.0, 1e-14);
}

TEST(Extrapolation, RefusesBadInput)
{
    const std::vector<std::pair<double, double>> few{{1.0, 1.0}, {0.5, 1.0}, {0.25, 1.0}};
    EXPECT_THROW(extrapolate_to_zero(few), PreconditionError);
    const std::vector<std::pair<double, double>> zigzag{{1.0, 1.0}, {0.5, 2.0}, {0.25, 1.0}, {0.125, 2.0}};
    EXPECT_THROW(extrapolate_to_zero(zigzag), PreconditionError);
    const std::vector<std::pair<double, double>> spacing{{1.0, 1.0}, {0.3, 1.0}, {0.1, 1.0}, {0.05, 1.0}};
    EXPECT_THROW(extrapolate_to_zero(spacing), PreconditionError);
}
