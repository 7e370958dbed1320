#include "filterstab/policy.hpp"

#include "filterstab/rng.hpp"

#include <stdexcept>

namespace filterstab {

namespace {

class FixedController final : public Controller {
public:
    explicit FixedController(ActionIndex u) : u_(u) {}
    ActionIndex act(ObsIndex) override { return u_; }
    std::unique_ptr<Controller> clone() const override {
        return std::make_unique<FixedController>(*this);
    }

private:
    ActionIndex u_;
};

class HistoryHashController final : public Controller {
public:
    HistoryHashController(std::size_t num_actions, std::uint64_t seed)
        : num_actions_(num_actions), state_(splitmix64(seed)) {}

    ActionIndex act(ObsIndex y) override {
        state_ = splitmix64(state_ ^ (static_cast<std::uint64_t>(y) + 1) * 0x9E3779B97F4A7C15ULL);
        return static_cast<ActionIndex>(state_ % num_actions_);
    }
    std::unique_ptr<Controller> clone() const override {
        return std::make_unique<HistoryHashController>(*this);
    }

private:
    std::size_t num_actions_;
    std::uint64_t state_;
};

} // namespace

std::unique_ptr<Controller> FixedActionPolicy::start() const {
    return std::make_unique<FixedController>(action_);
}

HistoryHashPolicy::HistoryHashPolicy(std::size_t num_actions, std::uint64_t seed)
    : num_actions_(num_actions), seed_(seed) {
    if (num_actions == 0)
        throw std::invalid_argument("HistoryHashPolicy needs at least one action");
}

std::unique_ptr<Controller> HistoryHashPolicy::start() const {
    return std::make_unique<HistoryHashController>(num_actions_, seed_);
}

} // namespace filterstab
