#pragma once

#include "filterstab/belief.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace filterstab {

/// Regular lattice on the belief simplex: every point with coordinates in
/// {0, 1/k, ..., 1}. Points are stored as integer counts summing to k and
/// enumerated in ascending lexicographic order of those counts.
class BeliefGrid {
public:
    BeliefGrid(std::size_t num_states, std::size_t resolution);

    std::size_t num_states() const noexcept { return num_states_; }
    std::size_t resolution() const noexcept { return resolution_; }
    std::size_t size() const noexcept { return size_; }

    std::span<const std::uint32_t> counts(std::size_t index) const {
        return {counts_.data() + index * num_states_, num_states_};
    }
    Belief point(std::size_t index) const;
    std::vector<Belief> points() const;

    /// Index of the count vector (which must sum to k).
    std::size_t index_of(std::span<const std::uint32_t> counts) const;

    /// Nearest grid point in l1; ties go to the lexicographically smallest
    /// count vector, i.e. the earliest point in enumeration order.
    std::size_t project(std::span<const double> belief) const;
    std::size_t project(const Belief& belief) const { return project(belief.probs()); }

private:
    std::size_t rank(const std::uint32_t* counts) const noexcept;

    /// Number of count vectors of `parts` entries summing to `total`.
    std::size_t compositions(std::size_t parts, std::size_t total) const;

    std::size_t num_states_;
    std::size_t resolution_;
    std::size_t size_;
    std::vector<std::uint32_t> counts_;
    std::vector<std::size_t> binomial_; // (parts, total) table for ranking
};

/// C(k + n - 1, n - 1).
std::size_t grid_point_count(std::size_t num_states, std::size_t resolution);

} // namespace filterstab
