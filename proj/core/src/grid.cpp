#include "filterstab/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace filterstab {

std::size_t grid_point_count(std::size_t num_states, std::size_t resolution) {
    if (num_states == 0)
        return 0;
    // C(k + n - 1, n - 1) computed incrementally; exact at the sizes used here.
    std::size_t result = 1;
    const std::size_t r = num_states - 1;
    for (std::size_t i = 1; i <= r; ++i)
        result = result * (resolution + i) / i;
    return result;
}

BeliefGrid::BeliefGrid(std::size_t num_states, std::size_t resolution)
    : num_states_(num_states), resolution_(resolution) {
    if (num_states == 0 || resolution == 0)
        throw std::invalid_argument("BeliefGrid needs positive state count and resolution");
    size_ = grid_point_count(num_states, resolution);

    binomial_.assign((num_states + 1) * (resolution + 1), 0);
    for (std::size_t parts = 1; parts <= num_states; ++parts)
        for (std::size_t total = 0; total <= resolution; ++total)
            binomial_[parts * (resolution + 1) + total] = grid_point_count(parts, total);

    counts_.reserve(size_ * num_states);
    std::vector<std::uint32_t> current(num_states, 0);
    // Lexicographic enumeration of compositions of k into n parts.
    auto emit = [&](auto&& self, std::size_t pos, std::size_t remaining) -> void {
        if (pos + 1 == num_states) {
            current[pos] = static_cast<std::uint32_t>(remaining);
            counts_.insert(counts_.end(), current.begin(), current.end());
            return;
        }
        for (std::size_t v = 0; v <= remaining; ++v) {
            current[pos] = static_cast<std::uint32_t>(v);
            self(self, pos + 1, remaining - v);
        }
    };
    emit(emit, 0, resolution);
}

std::size_t BeliefGrid::compositions(std::size_t parts, std::size_t total) const {
    return binomial_[parts * (resolution_ + 1) + total];
}

Belief BeliefGrid::point(std::size_t index) const {
    if (index >= size_)
        throw std::out_of_range("grid index out of range");
    std::vector<double> p(num_states_);
    const auto c = counts(index);
    const double k = static_cast<double>(resolution_);
    for (std::size_t i = 0; i < num_states_; ++i)
        p[i] = static_cast<double>(c[i]) / k;
    return Belief::normalized(std::move(p));
}

std::vector<Belief> BeliefGrid::points() const {
    std::vector<Belief> out;
    out.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i)
        out.push_back(point(i));
    return out;
}

std::size_t BeliefGrid::index_of(std::span<const std::uint32_t> c) const {
    if (c.size() != num_states_)
        throw std::invalid_argument("count vector has wrong length");
    std::size_t remaining = resolution_;
    for (std::size_t i = 0; i + 1 < num_states_; ++i) {
        if (c[i] > remaining)
            throw std::invalid_argument("count vector does not sum to the resolution");
        remaining -= c[i];
    }
    if (c[num_states_ - 1] != remaining)
        throw std::invalid_argument("count vector does not sum to the resolution");
    return rank(c.data());
}

std::size_t BeliefGrid::rank(const std::uint32_t* c) const noexcept {
    // Points before c: for each leading prefix, all completions whose next
    // entry is smaller. Summing compositions(rest, remaining - v) over v < c[i]
    // telescopes to a difference of compositions with one more part.
    std::size_t rank = 0;
    std::size_t remaining = resolution_;
    for (std::size_t i = 0; i + 1 < num_states_; ++i) {
        const std::size_t parts = num_states_ - i;
        rank += compositions(parts, remaining) - compositions(parts, remaining - c[i]);
        remaining -= c[i];
    }
    return rank;
}

std::size_t BeliefGrid::project(std::span<const double> belief) const {
    if (belief.size() != num_states_)
        throw std::invalid_argument("belief has wrong length for the grid");
    const double k = static_cast<double>(resolution_);

    constexpr std::size_t kInline = 16;
    std::array<std::uint32_t, kInline> c_inline;
    std::array<double, kInline> frac_inline;
    std::vector<std::uint32_t> c_heap;
    std::vector<double> frac_heap;
    std::uint32_t* c = c_inline.data();
    double* frac = frac_inline.data();
    if (num_states_ > kInline) {
        c_heap.resize(num_states_);
        frac_heap.resize(num_states_);
        c = c_heap.data();
        frac = frac_heap.data();
    }

    // An l1-optimal lattice point rounds every coordinate to its floor or
    // ceiling; the floor deficit goes to the coordinates with the largest
    // fractional parts.
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < num_states_; ++i) {
        const double z = std::clamp(belief[i], 0.0, 1.0) * k;
        const double fl = std::floor(z);
        c[i] = static_cast<std::uint32_t>(fl);
        frac[i] = z - fl;
        assigned += c[i];
    }
    if (assigned > resolution_)
        throw std::invalid_argument("belief mass exceeds one");
    std::size_t deficit = resolution_ - assigned;

    // Among equal fractions, rounding up a later coordinate keeps the count
    // vector lexicographically smaller. Fractions within rounding noise of
    // each other count as equal.
    constexpr double kTie = 1e-12;
    for (; deficit > 0 && deficit <= num_states_; --deficit) {
        std::size_t best = num_states_;
        for (std::size_t i = num_states_; i-- > 0;) {
            if (frac[i] < 0.0)
                continue;
            if (best == num_states_ || frac[i] > frac[best] + kTie)
                best = i;
        }
        ++c[best];
        frac[best] = -1.0;
    }
    // Only inputs with mass well below one get here.
    c[num_states_ - 1] += static_cast<std::uint32_t>(deficit);
    return rank(c);
}

} // namespace filterstab
