#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace filterstab {

/// Point estimate with its standard error (0 for exact computations).
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Running mean/variance (Welford), mergeable in a fixed order.
class Moments {
public:
    void add(double x) noexcept {
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }

    void merge(const Moments& other) noexcept;

    std::size_t count() const noexcept { return count_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept {
        return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
    }
    double std_error() const noexcept {
        return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
    }
    Estimate estimate() const noexcept { return {mean(), std_error()}; }

private:
    std::size_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Samples are processed in fixed blocks of this size.
inline constexpr std::size_t kMonteCarloBlock = 2048;

/// Writes `width` per-sample statistics for sample `index` into `out`.
using SampleFn = std::function<void(std::size_t index, std::span<double> out)>;

/// Runs `samples` independent samples in parallel and returns one Moments per
/// statistic. Blocks are reduced in block order, so the result is bit-identical
/// for any worker count.
std::vector<Moments> monte_carlo_moments(std::size_t samples, std::size_t width,
                                         const SampleFn& sample);

} // namespace filterstab
