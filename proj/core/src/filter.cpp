#include "filterstab/filter.hpp"

#include <cmath>
#include <stdexcept>

namespace filterstab {

namespace {

void check_obs(const PomdpModel& model, ObsIndex y) {
    if (y >= model.num_obs())
        throw std::out_of_range("observation index " + std::to_string(y) + " out of range");
}

void check_action(const PomdpModel& model, ActionIndex u) {
    if (u >= model.num_actions())
        throw std::out_of_range("action index " + std::to_string(u) + " out of range");
}

void check_size(const PomdpModel& model, std::size_t n) {
    if (n != model.num_states())
        throw std::invalid_argument("belief has " + std::to_string(n) + " entries, model has " +
                                    std::to_string(model.num_states()) + " states");
}

} // namespace

double measurement_update_inplace(const PomdpModel& model, std::span<double> belief, ObsIndex y) {
    const Matrix& q = model.observation();
    double total = 0.0;
    for (std::size_t x = 0; x < belief.size(); ++x) {
        belief[x] *= q(x, y);
        total += belief[x];
    }
    if (!(total > 0.0))
        return 0.0;
    for (double& p : belief)
        p /= total;
    return total;
}

void time_update_into(const PomdpModel& model, std::span<const double> filter, ActionIndex u,
                      std::span<double> out) {
    const Matrix& t = model.transition(u);
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t x = 0; x < filter.size(); ++x) {
        const double w = filter[x];
        if (w == 0.0)
            continue;
        const auto row = t.row(x);
        for (std::size_t x2 = 0; x2 < out.size(); ++x2)
            out[x2] += w * row[x2];
    }
    double total = 0.0;
    for (double p : out)
        total += p;
    for (double& p : out)
        p /= total;
}

Belief measurement_update(const PomdpModel& model, const Belief& predictor, ObsIndex y) {
    check_size(model, predictor.size());
    check_obs(model, y);
    std::vector<double> work(predictor.probs().begin(), predictor.probs().end());
    if (measurement_update_inplace(model, work, y) == 0.0)
        throw ZeroLikelihood(y, std::nullopt);
    return Belief::normalized(std::move(work));
}

Belief time_update(const PomdpModel& model, const Belief& filter, ActionIndex u) {
    check_size(model, filter.size());
    check_action(model, u);
    std::vector<double> out(model.num_states());
    time_update_into(model, filter.probs(), u, out);
    return Belief::normalized(std::move(out));
}

std::vector<FilterState> run_filter(const PomdpModel& model, const Belief& prior,
                                    std::span<const ObsIndex> observations,
                                    std::span<const ActionIndex> actions) {
    if (observations.empty() || actions.size() + 1 != observations.size())
        throw std::invalid_argument("run_filter needs n+1 observations and n actions");
    check_size(model, prior.size());

    std::vector<FilterState> out;
    out.reserve(observations.size());
    Belief predictor = prior;
    for (std::size_t t = 0; t < observations.size(); ++t) {
        check_obs(model, observations[t]);
        Belief filter = [&] {
            try {
                return measurement_update(model, predictor, observations[t]);
            } catch (const ZeroLikelihood&) {
                throw ZeroLikelihood(observations[t], t);
            }
        }();
        out.push_back({t, predictor, filter});
        if (t < actions.size())
            predictor = time_update(model, filter, actions[t]);
    }
    return out;
}

std::map<std::vector<ObsIndex>, OracleEntry>
enumeration_oracle(const PomdpModel& model, const Belief& prior, const Policy& policy,
                   std::size_t horizon, double limit) {
    check_size(model, prior.size());
    const std::size_t nx = model.num_states();
    const std::size_t ny = model.num_obs();
    const double steps = static_cast<double>(horizon + 1);
    const double required =
        std::pow(static_cast<double>(nx), steps) * std::pow(static_cast<double>(ny), steps);
    if (required > limit)
        throw EnumerationLimitError(required, limit);

    const Matrix& q = model.observation();
    std::map<std::vector<ObsIndex>, OracleEntry> out;

    std::vector<ObsIndex> ys(horizon + 1, 0);
    std::vector<ActionIndex> us(horizon);
    std::vector<double> joint(nx); // P(X_n = x, Y_{0:n} = ys)

    // Depth-first walk over state paths x_0..x_n for a fixed (ys, us); the
    // running product is the path weight up to the current depth.
    auto walk_states = [&](auto&& self, std::size_t t, StateIndex x, double weight) -> void {
        if (weight == 0.0)
            return;
        if (t == horizon) {
            joint[x] += weight;
            return;
        }
        const auto row = model.transition(us[t]).row(x);
        for (StateIndex x2 = 0; x2 < nx; ++x2)
            self(self, t + 1, x2, weight * row[x2] * q(x2, ys[t + 1]));
    };

    // Odometer over all observation sequences.
    while (true) {
        auto controller = policy.start();
        for (std::size_t t = 0; t < horizon; ++t) {
            us[t] = controller->act(ys[t]);
            check_action(model, us[t]);
        }

        std::fill(joint.begin(), joint.end(), 0.0);
        for (StateIndex x0 = 0; x0 < nx; ++x0)
            walk_states(walk_states, 0, x0, prior[x0] * q(x0, ys[0]));

        double total = 0.0;
        for (double j : joint)
            total += j;
        if (total > 0.0) {
            std::vector<double> filt(joint);
            for (double& p : filt)
                p /= total;
            out.emplace(ys, OracleEntry{total, us, Belief::normalized(std::move(filt))});
        }

        std::size_t pos = horizon + 1;
        while (pos > 0) {
            --pos;
            if (++ys[pos] < ny)
                break;
            ys[pos] = 0;
            if (pos == 0) {
                return out;
            }
        }
    }
}

} // namespace filterstab
