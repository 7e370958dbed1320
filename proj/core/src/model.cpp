#include "filterstab/model.hpp"

#include <charconv>
#include <cmath>

namespace filterstab {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void check_shape(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& name,
                 std::vector<Violation>& out) {
    if (m.rows() != rows || m.cols() != cols)
        out.push_back({name, "expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                                 ", got " + std::to_string(m.rows()) + "x" +
                                 std::to_string(m.cols())});
}

void check_stochastic(const Matrix& m, const std::string& name, std::vector<Violation>& out) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const std::string where = name + " row " + std::to_string(r);
        double total = 0.0;
        bool entries_ok = true;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double v = m(r, c);
            if (!std::isfinite(v) || v < 0.0) {
                out.push_back({where, "entry " + std::to_string(c) + " = " + fmt_double(v) +
                                          " is negative or not finite"});
                entries_ok = false;
            }
            total += v;
        }
        if (entries_ok && std::abs(total - 1.0) > kStochasticTolerance)
            out.push_back({where, "sums to " + fmt_double(total) + ", expected 1"});
    }
}

} // namespace

std::vector<Violation> validate(const ModelData& d) {
    std::vector<Violation> out;
    if (d.num_states == 0)
        out.push_back({"num_states", "must be positive"});
    if (d.num_obs == 0)
        out.push_back({"num_obs", "must be positive"});
    if (d.num_actions == 0)
        out.push_back({"num_actions", "must be positive"});
    if (!std::isfinite(d.discount) || d.discount < 0.0)
        out.push_back({"discount", "must be >= 0"});
    else if (d.discount >= 1.0)
        out.push_back({"discount", "discount must be < 1"});

    if (d.transition.size() != d.num_actions)
        out.push_back({"transition", "expected " + std::to_string(d.num_actions) +
                                         " matrices, got " + std::to_string(d.transition.size())});
    for (std::size_t u = 0; u < d.transition.size(); ++u) {
        const std::string name = "transition[" + std::to_string(u) + "]";
        const std::size_t before = out.size();
        check_shape(d.transition[u], d.num_states, d.num_states, name, out);
        if (out.size() == before)
            check_stochastic(d.transition[u], name, out);
    }

    {
        const std::size_t before = out.size();
        check_shape(d.observation, d.num_states, d.num_obs, "observation", out);
        if (out.size() == before)
            check_stochastic(d.observation, "observation", out);
    }

    {
        const std::size_t before = out.size();
        check_shape(d.cost, d.num_states, d.num_actions, "cost", out);
        if (out.size() == before) {
            for (std::size_t x = 0; x < d.cost.rows(); ++x)
                for (std::size_t u = 0; u < d.cost.cols(); ++u) {
                    const double v = d.cost(x, u);
                    if (!std::isfinite(v) || v < 0.0)
                        out.push_back({"cost[" + std::to_string(x) + "][" + std::to_string(u) + "]",
                                       "cost " + fmt_double(v) + " must be finite and >= 0"});
                }
        }
    }

    if (d.labels) {
        auto check_len = [&](const std::vector<std::string>& names, std::size_t n,
                             const char* what) {
            if (!names.empty() && names.size() != n)
                out.push_back({std::string("labels.") + what,
                               "expected " + std::to_string(n) + " names, got " +
                                   std::to_string(names.size())});
        };
        check_len(d.labels->states, d.num_states, "states");
        check_len(d.labels->observations, d.num_obs, "observations");
        check_len(d.labels->actions, d.num_actions, "actions");
    }
    return out;
}

PomdpModel::PomdpModel(ModelData data) : data_(std::move(data)) {
    auto violations = validate(data_);
    if (!violations.empty())
        throw ModelError(std::move(violations));
    for (std::size_t x = 0; x < data_.cost.rows(); ++x)
        for (double v : data_.cost.row(x))
            cost_sup_ = std::max(cost_sup_, v);
}

PomdpModel PomdpModel::with_discount(double discount) const {
    ModelData copy = data_;
    copy.discount = discount;
    return PomdpModel(std::move(copy));
}

} // namespace filterstab
