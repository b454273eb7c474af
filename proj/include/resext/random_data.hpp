#pragma once

// Random diagonal configurations at a jumping number, for property tests.

#include "resext/ideal_engine.hpp"
#include "resext/toric_model.hpp"

#include <cstdint>
#include <random>

namespace resext {

struct RandomDataOptions {
    std::size_t max_n = 3;
    int max_denominator = 6;
    /// The jump is drawn from the first few jumping numbers to keep exponents small.
    std::size_t max_jump_index = 4;
};

inline ToricData random_toric_data(std::mt19937_64& rng, const RandomDataOptions& opt = {})
{
    std::uniform_int_distribution<std::size_t> dim(1, opt.max_n);
    std::uniform_int_distribution<int> den(1, opt.max_denominator);
    auto rational = [&](int max_ratio) {
        const int q = den(rng);
        std::uniform_int_distribution<int> num(0, max_ratio * q);
        return Rational(num(rng), q);
    };
    const std::size_t n = dim(rng);
    std::vector<Rational> c(n), nu(n);
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
        c[j] = rational(2);
        nu[j] = rational(2);
        any = any || nu[j] > 0;
    }
    if (!any) nu[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = 1;

    ToricData data = ToricData::make(c, nu, 0);
    // nu_j >= 1/6 guarantees a jump below 12.
    const JumpSchedule s = jumping_numbers(data, 0, 12);
    const std::size_t count = std::min(s.jumps.size(), opt.max_jump_index);
    const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
    return data.with_m(s.jumps[pick]);
}

} // namespace resext
