#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace resext::detail {

/// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Sums in increasing magnitude with compensation; the result does not depend
/// on the order in which the terms were produced.
inline double stable_sum(std::span<const double> terms)
{
    std::vector<double> sorted(terms.begin(), terms.end());
    std::sort(sorted.begin(), sorted.end(), [](double a, double b) {
        const double aa = std::abs(a), bb = std::abs(b);
        return aa < bb || (aa == bb && a < b);
    });
    CompensatedSum acc;
    for (double x : sorted) acc.add(x);
    return acc.value();
}

} // namespace resext::detail
