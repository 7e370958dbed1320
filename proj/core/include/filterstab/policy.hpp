#pragma once

#include "filterstab/belief.hpp"

#include <cstdint>
#include <memory>

namespace filterstab {

/// One run of an admissible policy. Fed the observations y_0, y_1, ... in
/// order, it returns the action u_t to apply after seeing y_t. Actions are
/// therefore functions of the observation history only.
class Controller {
public:
    virtual ~Controller() = default;

    virtual ActionIndex act(ObsIndex y) = 0;

    /// Copy of the current run state, for branching enumerations.
    virtual std::unique_ptr<Controller> clone() const = 0;
};

/// Factory for controllers; a policy is immutable and shareable.
class Policy {
public:
    virtual ~Policy() = default;

    virtual std::unique_ptr<Controller> start() const = 0;
};

/// Always applies the same action.
class FixedActionPolicy final : public Policy {
public:
    explicit FixedActionPolicy(ActionIndex action) : action_(action) {}

    std::unique_ptr<Controller> start() const override;

private:
    ActionIndex action_;
};

/// Deterministic pseudo-random policy: u_t is a hash of (seed, y_0..y_t)
/// reduced modulo |U|. Gives history-dependent actions that enumerations can
/// reproduce exactly.
class HistoryHashPolicy final : public Policy {
public:
    HistoryHashPolicy(std::size_t num_actions, std::uint64_t seed);

    std::unique_ptr<Controller> start() const override;

private:
    std::size_t num_actions_;
    std::uint64_t seed_;
};

} // namespace filterstab
