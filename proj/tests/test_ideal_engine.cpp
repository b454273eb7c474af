#include "resext/ideal_engine.hpp"
#include "resext/random_data.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

using namespace resext;

namespace {

Rational q(long long p, long long d = 1) { return Rational(p, d); }

// Oracle: int_delta^1 x^p dx stays bounded as delta -> 0, judged from the
// partial integrals at two tiny cutoffs.
bool integrable_at_zero(double p)
{
    auto partial = [p](double log_delta) {
        if (std::abs(p + 1.0) < 1e-12) return -log_delta;
        return (1.0 - std::exp((p + 1.0) * log_delta)) / (p + 1.0);
    };
    const double a = partial(-1e5), b = partial(-2e5);
    return std::isfinite(b) && std::abs(b - a) <= 1e-9 * (1.0 + std::abs(a));
}

bool oracle_in_multiplier_ideal(const ToricData& d, const Exponent& a, const Rational& m)
{
    for (std::size_t j = 0; j < d.n; ++j) {
        if (!integrable_at_zero(a[j] - to_double(d.exponent(j, m)))) return false;
    }
    return true;
}

template <class Fn>
void for_each_in_box(std::size_t n, int bound, Fn&& fn)
{
    Exponent a(n, 0);
    while (true) {
        fn(a);
        std::size_t j = 0;
        while (j < n && ++a[j] > bound) a[j++] = 0;
        if (j == n) break;
    }
}

} // namespace

TEST(MultiplierIdeal, PowerOfTheDivisor)
{
    const auto d = ToricData::make({0}, {1}, 0);
    for (auto [m, power] : std::vector<std::pair<Rational, int>>{{q(1, 2), 0}, {q(1), 1}, {q(3, 2), 1}, {q(5, 2), 2}, {q(3), 3}}) {
        EXPECT_EQ(multiplier_ideal(d, m), MonomialIdeal::principal({power})) << to_string(m);
    }
}

TEST(MultiplierIdeal, ZeroWeightIsUnit)
{
    const auto d = ToricData::make({0, 0, 0}, {q(2, 3), 1, q(5, 4)}, 0);
    EXPECT_TRUE(multiplier_ideal(d, 0).is_unit());
}

TEST(MultiplierIdeal, HalfExponent)
{
    const auto d = ToricData::make({q(1, 2)}, {1}, 0);
    EXPECT_EQ(multiplier_ideal(d, q(1, 2)), MonomialIdeal::principal({1}));
    EXPECT_FALSE(oracle_in_multiplier_ideal(d, {0}, q(1, 2)));
    EXPECT_TRUE(oracle_in_multiplier_ideal(d, {1}, q(1, 2)));
}

TEST(MultiplierIdeal, AgreesWithIntegrabilityOracle)
{
    std::mt19937_64 rng(3);
    RandomDataOptions opt;
    opt.max_n = 3;
    for (int k = 0; k < 60; ++k) {
        const ToricData d = random_toric_data(rng, opt);
        const std::vector<Rational> weights{d.m, d.m / 2, d.m + q(1, 3)};
        for (const Rational& m : weights) {
            const auto I = multiplier_ideal(d, m);
            for_each_in_box(d.n, 5, [&](const Exponent& a) {
                ASSERT_EQ(I.contains(a), oracle_in_multiplier_ideal(d, a, m)) << "config " << k;
            });
        }
    }
}

TEST(JumpingNumbers, Integers)
{
    const auto d = ToricData::make({0}, {1}, 0);
    const auto s = jumping_numbers(d, 0, 3);
    EXPECT_EQ(s.jumps, (std::vector<Rational>{q(1), q(2), q(3)}));
    EXPECT_EQ(jumping_numbers(d, 0, 5).jumps.size(), 5u);
}

TEST(JumpingNumbers, HalfIntegers)
{
    const auto d = ToricData::make({q(1, 2), 0}, {1, 1}, 0);
    EXPECT_EQ(jumping_numbers(d, 0, 2).jumps, (std::vector<Rational>{q(1, 2), q(1), q(3, 2), q(2)}));
}

TEST(JumpingNumbers, OpenRangeAndEmptyRange)
{
    const auto d = ToricData::make({0}, {1}, 0);
    EXPECT_TRUE(jumping_numbers(d, 0, q(99, 100)).jumps.empty());
    EXPECT_TRUE(jumping_numbers(d, 0, 0).jumps.empty());
    EXPECT_TRUE(jumping_numbers(d, 2, 1).jumps.empty());
}

// Jumps are exactly the grid points where the ideal differs from the one just
// below. Every jump (k - c_j) / nu_j has denominator dividing
// den(c_j) * num(nu_j), so the 1/L grid with L the lcm of those catches them all.
TEST(JumpingNumbers, GridScanOracle)
{
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
        const ToricData d = random_toric_data(rng).with_m(0);
        BigInt L = 1;
        for (std::size_t j = 0; j < d.n; ++j) {
            if (d.nu[j] == 0) continue;
            const BigInt step = denominator(d.c[j]) * numerator(d.nu[j]);
            L = boost::multiprecision::lcm(L, step);
        }
        const Rational hi = 2;
        const Rational h(BigInt(1), L);
        std::set<Rational> expected;
        for (Rational m = h; m <= hi; m += h) {
            if (!(multiplier_ideal(d, m) == multiplier_ideal(d, m - h / 2))) expected.insert(m);
        }
        const auto s = jumping_numbers(d, 0, hi);
        EXPECT_EQ(std::set<Rational>(s.jumps.begin(), s.jumps.end()), expected) << "config " << k;
    }
}

TEST(LcStructure, Examples)
{
    const auto box = lc_structure(ToricData::make({0, 0}, {1, 1}, 1));
    EXPECT_EQ(box.relevant, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(box.sigma_mlc, 2u);
    EXPECT_EQ(box.centres(1), (std::vector<std::vector<std::size_t>>{{0}, {1}}));
    EXPECT_EQ(box.centres(2), (std::vector<std::vector<std::size_t>>{{0, 1}}));

    const auto mixed = lc_structure(ToricData::make({q(1, 2), 0}, {1, 1}, q(3, 2)));
    EXPECT_EQ(mixed.relevant, std::vector<std::size_t>{0});
    EXPECT_EQ(mixed.sigma_mlc, 1u);

    EXPECT_EQ(lc_structure(ToricData::make({0}, {1}, 1)).sigma_mlc, 1u);
    EXPECT_THROW(lc_structure(ToricData::make({0}, {1}, q(1, 2))), NotAJumpError);
}

TEST(AdjointIdeal, BoxExamples)
{
    const auto d = ToricData::make({0, 0}, {1, 1}, 1);
    const auto jumps = jumping_numbers(d, 0, 1);
    EXPECT_EQ(adjoint_ideal(d, jumps, 0), MonomialIdeal::principal({1, 1}));
    EXPECT_EQ(adjoint_ideal(d, jumps, 1), MonomialIdeal(2, {{1, 0}, {0, 1}}));
    EXPECT_TRUE(adjoint_ideal(d, jumps, 2).is_unit());
}

TEST(CombinatorialMembership, BoxExamples)
{
    const auto d = ToricData::make({0, 0}, {1, 1}, 1);
    EXPECT_TRUE(combinatorial_membership(d, {0, 0}, 2));
    EXPECT_FALSE(combinatorial_membership(d, {0, 0}, 1));
    EXPECT_TRUE(combinatorial_membership(d, {1, 0}, 1));
    EXPECT_TRUE(combinatorial_membership(d, {1, 1}, 0));
    EXPECT_EQ(equality_set(d, {1, 0}), std::vector<std::size_t>{1});
}

TEST(AdjointFiltration, PropertiesOnRandomData)
{
    std::mt19937_64 rng(2024);
    RandomDataOptions opt;
    opt.max_n = 4;
    for (int k = 0; k < 100; ++k) {
        const ToricData d = random_toric_data(rng, opt);
        const auto jumps = jumping_numbers(d, 0, d.m);
        const auto lc = lc_structure(d);
        std::vector<MonomialIdeal> A;
        for (std::size_t s = 0; s <= lc.sigma_mlc + 1; ++s) A.push_back(adjoint_ideal(d, jumps, s));
        for (std::size_t s = 0; s + 1 < A.size(); ++s) EXPECT_TRUE(A[s + 1].contains(A[s])) << "config " << k;
        EXPECT_EQ(A[0], multiplier_ideal(d, d.m));
        EXPECT_EQ(A[lc.sigma_mlc], multiplier_ideal_left_limit(d, d.m));
        EXPECT_EQ(A[lc.sigma_mlc], multiplier_ideal(d, jumps.predecessor(d.m)));
        EXPECT_EQ(A[lc.sigma_mlc + 1], A[lc.sigma_mlc]);
        for (std::size_t s = 1; s <= lc.sigma_mlc; ++s) EXPECT_TRUE(lc.lcc_ideal(s).is_square_free());

        // Two characterizations of A_sigma agree, and the filtration steps
        // match the equality-set sizes that occur.
        int bound = 1;
        for (std::size_t j = 0; j < d.n; ++j) bound = std::max(bound, static_cast<int>(to_ll(floor(d.exponent(j)))) + 2);
        std::set<std::size_t> sizes;
        for_each_in_box(d.n, bound, [&](const Exponent& a) {
            for (std::size_t s = 0; s <= lc.sigma_mlc + 1; ++s) {
                ASSERT_EQ(A[s].contains(a), combinatorial_membership(d, a, s)) << "config " << k;
            }
            if (combinatorial_membership(d, a, lc.sigma_mlc)) sizes.insert(equality_set(d, a).size());
        });
        std::size_t strict = 0;
        for (std::size_t s = 1; s <= lc.sigma_mlc; ++s) strict += A[s] == A[s - 1] ? 0 : 1;
        EXPECT_EQ(strict + 1, sizes.size()) << "config " << k;
    }
}

TEST(MonomialIdeal, ProductIsAntichain)
{
    const MonomialIdeal a(2, {{1, 0}, {0, 1}});
    const MonomialIdeal b(2, {{1, 0}, {0, 1}, {2, 2}});
    EXPECT_EQ(b, a);
    const auto p = a.product(a);
    EXPECT_EQ(p, MonomialIdeal(2, {{2, 0}, {1, 1}, {0, 2}}));
    EXPECT_TRUE(a.contains(p));
    EXPECT_FALSE(p.contains(a));
}
