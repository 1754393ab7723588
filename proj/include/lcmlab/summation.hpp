#pragma once

#include <cmath>
#include <ranges>

namespace lcmlab {

/// Neumaier (improved Kahan) running sum. The result depends only on the
/// order of the added terms, so callers fix that order for reproducibility.
class CompensatedSum {
public:
    constexpr CompensatedSum() = default;
    constexpr explicit CompensatedSum(double initial) : sum_(initial) {}

    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }

    CompensatedSum& operator+=(double v) noexcept {
        add(v);
        return *this;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

template <std::ranges::input_range R>
double compensated_sum(R&& values) {
    CompensatedSum acc;
    for (double v : values) acc.add(v);
    return acc.value();
}

}  // namespace lcmlab
