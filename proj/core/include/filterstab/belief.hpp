#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace filterstab {

using StateIndex = std::size_t;
using ObsIndex = std::size_t;
using ActionIndex = std::size_t;

/// Tolerance on |sum - 1| for beliefs and kernel rows.
inline constexpr double kStochasticTolerance = 1e-12;

/// Probability vector over the state set. Used for priors, predictors and
/// filters alike. Always non-negative and normalized.
class Belief {
public:
    /// Validates: entries finite, >= 0, sum within kStochasticTolerance of 1.
    /// Throws std::invalid_argument otherwise. Does not renormalize.
    static Belief from_probabilities(std::vector<double> probs);

    /// Divides by the total mass. Throws std::invalid_argument when the mass is
    /// zero or any weight is negative.
    static Belief normalized(std::vector<double> weights);

    static Belief point_mass(std::size_t num_states, StateIndex x);
    static Belief uniform(std::size_t num_states);

    /// Parses "0.3,0.7"; throws ParseError on bad syntax or an invalid belief.
    static Belief parse(const std::string& text);

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::span<const double> probs() const noexcept { return probs_; }

    bool has_full_support() const noexcept;

    bool operator==(const Belief&) const = default;

private:
    explicit Belief(std::vector<double> probs) : probs_(std::move(probs)) {}

    std::vector<double> probs_;
};

/// True iff nu[x] == 0 implies mu[x] == 0.
bool absolutely_continuous(const Belief& mu, const Belief& nu) noexcept;

/// Throws AbsoluteContinuityError naming the first offending state.
void require_absolutely_continuous(const Belief& mu, const Belief& nu);

std::string to_string(const Belief& b);

} // namespace filterstab
