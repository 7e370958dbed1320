#pragma once

#include <cstdint>
#include <span>

namespace filterstab {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: draw k of stream s under seed is a pure function
/// of (seed, s, k). Monte Carlo sample i owns stream i, so results do not
/// depend on how samples are scheduled across workers.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

    std::uint64_t next() noexcept { return splitmix64(key_ + 0xD1B54A32D192ED03ULL * ++counter_); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Index drawn from a probability vector (entries need not sum exactly to
    /// one; the last positive entry absorbs rounding).
    std::size_t categorical(std::span<const double> probs) noexcept {
        const double u = uniform();
        double acc = 0.0;
        std::size_t last = 0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] <= 0.0)
                continue;
            acc += probs[i];
            last = i;
            if (u < acc)
                return i;
        }
        return last;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace filterstab
