#pragma once

#include "filterstab/belief.hpp"
#include "filterstab/errors.hpp"
#include "filterstab/matrix.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace filterstab {

/// Optional human-readable names; indices remain the identity of every label.
struct ModelLabels {
    std::vector<std::string> states;
    std::vector<std::string> observations;
    std::vector<std::string> actions;

    bool operator==(const ModelLabels&) const = default;
};

/// Raw, possibly invalid model contents as read from a file or built in code.
struct ModelData {
    std::size_t num_states = 0;
    std::size_t num_obs = 0;
    std::size_t num_actions = 0;
    double discount = 0.0;
    std::vector<Matrix> transition; ///< one |X|x|X| matrix per action, [x][x'] = T(x'|x,u)
    Matrix observation;             ///< |X|x|Y|, [x][y] = Q(y|x)
    Matrix cost;                    ///< |X|x|U|, [x][u] = c(x,u)
    std::optional<ModelLabels> labels;

    bool operator==(const ModelData&) const = default;
};

/// Checks every model invariant. Empty result iff the model is valid; each
/// entry names the offending matrix, row or entry.
std::vector<Violation> validate(const ModelData& data);

/// Finite POMDP with action-independent observation channel. Immutable once
/// constructed; construction validates and throws ModelError.
class PomdpModel {
public:
    explicit PomdpModel(ModelData data);

    std::size_t num_states() const noexcept { return data_.num_states; }
    std::size_t num_obs() const noexcept { return data_.num_obs; }
    std::size_t num_actions() const noexcept { return data_.num_actions; }
    double discount() const noexcept { return data_.discount; }

    const Matrix& transition(ActionIndex u) const { return data_.transition.at(u); }
    const Matrix& observation() const noexcept { return data_.observation; }
    const Matrix& cost() const noexcept { return data_.cost; }

    /// Sup norm of the cost, ||c||_inf.
    double cost_sup() const noexcept { return cost_sup_; }

    const ModelData& data() const noexcept { return data_; }

    /// Same kernels and cost under another discount factor.
    PomdpModel with_discount(double discount) const;

    bool operator==(const PomdpModel& other) const { return data_ == other.data_; }

private:
    ModelData data_;
    double cost_sup_ = 0.0;
};

/// Realized sample path: states and observations have length n+1, actions n.
struct Trajectory {
    std::vector<StateIndex> states;
    std::vector<ObsIndex> observations;
    std::vector<ActionIndex> actions;

    bool is_consistent() const noexcept {
        return states.size() == observations.size() && !states.empty() &&
               actions.size() + 1 == states.size();
    }
};

/// Parses the JSON model format without validating invariants. Throws
/// ParseError with the field path (or line/column for syntax errors).
ModelData parse_model_data(std::string_view json_text);

/// Reads a model file without validating it. Throws ParseError, including
/// for unreadable files.
ModelData read_model_data(const std::filesystem::path& path);

/// Reads and validates. Throws ParseError or ModelError.
PomdpModel load_model(const std::filesystem::path& path);

std::string model_to_json(const ModelData& data);
void save_model(const PomdpModel& model, const std::filesystem::path& path);

} // namespace filterstab
