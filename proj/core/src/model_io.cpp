#include "filterstab/model.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace filterstab {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(std::string("missing required field \"") + key + "\"");
    return *it;
}

std::size_t read_count(const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ParseError(std::string("field \"") + key + "\": expected a non-negative integer");
    return v.get<std::size_t>();
}

double read_number(const json& v, const std::string& path) {
    if (!v.is_number())
        throw ParseError("field \"" + path + "\": expected a number");
    return v.get<double>();
}

Matrix read_matrix(const json& v, const std::string& path) {
    if (!v.is_array())
        throw ParseError("field \"" + path + "\": expected an array of rows");
    std::vector<std::vector<double>> rows;
    rows.reserve(v.size());
    for (std::size_t r = 0; r < v.size(); ++r) {
        const std::string row_path = path + "[" + std::to_string(r) + "]";
        if (!v[r].is_array())
            throw ParseError("field \"" + row_path + "\": expected an array of numbers");
        std::vector<double> row;
        row.reserve(v[r].size());
        for (std::size_t c = 0; c < v[r].size(); ++c)
            row.push_back(read_number(v[r][c], row_path + "[" + std::to_string(c) + "]"));
        rows.push_back(std::move(row));
    }
    try {
        return Matrix::from_rows(rows);
    } catch (const std::invalid_argument& e) {
        throw ParseError("field \"" + path + "\": " + e.what());
    }
}

std::vector<std::string> read_names(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end())
        return {};
    if (!it->is_array())
        throw ParseError(std::string("field \"labels.") + key + "\": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& s : *it) {
        if (!s.is_string())
            throw ParseError(std::string("field \"labels.") + key + "\": expected strings");
        out.push_back(s.get<std::string>());
    }
    return out;
}

} // namespace

ModelData parse_model_data(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports "line L, column C" inside what().
        throw ParseError(std::string("model JSON syntax error: ") + e.what());
    }
    if (!doc.is_object())
        throw ParseError("model JSON must be an object");

    ModelData d;
    d.num_states = read_count(doc, "num_states");
    d.num_obs = read_count(doc, "num_obs");
    d.num_actions = read_count(doc, "num_actions");
    d.discount = read_number(require(doc, "discount"), "discount");

    const json& transition = require(doc, "transition");
    if (!transition.is_array())
        throw ParseError("field \"transition\": expected an array of matrices");
    for (std::size_t u = 0; u < transition.size(); ++u)
        d.transition.push_back(read_matrix(transition[u], "transition[" + std::to_string(u) + "]"));
    d.observation = read_matrix(require(doc, "observation"), "observation");
    d.cost = read_matrix(require(doc, "cost"), "cost");

    if (auto it = doc.find("labels"); it != doc.end() && !it->is_null()) {
        if (!it->is_object())
            throw ParseError("field \"labels\": expected an object");
        d.labels = ModelLabels{read_names(*it, "states"), read_names(*it, "observations"),
                               read_names(*it, "actions")};
    }
    return d;
}

ModelData read_model_data(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open model file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_model_data(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

PomdpModel load_model(const std::filesystem::path& path) {
    return PomdpModel(read_model_data(path));
}

std::string model_to_json(const ModelData& d) {
    json doc;
    doc["num_states"] = d.num_states;
    doc["num_obs"] = d.num_obs;
    doc["num_actions"] = d.num_actions;
    doc["discount"] = d.discount;
    json transition = json::array();
    for (const auto& t : d.transition)
        transition.push_back(t.to_rows());
    doc["transition"] = std::move(transition);
    doc["observation"] = d.observation.to_rows();
    doc["cost"] = d.cost.to_rows();
    if (d.labels) {
        json labels = json::object();
        if (!d.labels->states.empty())
            labels["states"] = d.labels->states;
        if (!d.labels->observations.empty())
            labels["observations"] = d.labels->observations;
        if (!d.labels->actions.empty())
            labels["actions"] = d.labels->actions;
        doc["labels"] = std::move(labels);
    }
    // nlohmann emits the shortest decimal that round-trips each double.
    return doc.dump(2) + "\n";
}

void save_model(const PomdpModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write model file " + path.string());
    out << model_to_json(model.data());
    if (!out)
        throw ParseError("failed writing model file " + path.string());
}

} // namespace filterstab
