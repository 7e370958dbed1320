#include "cli.hpp"

#include "filterstab/bounds.hpp"
#include "filterstab/contraction.hpp"
#include "filterstab/metrics.hpp"
#include "filterstab/observability.hpp"
#include "filterstab/robustness.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

namespace filterstab::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

class IoError : public Error {
public:
    using Error::Error;
};

/// Settings shared by the experiment subcommands; a JSON config file may
/// supply any of them, explicit flags win.
struct ExperimentConfig {
    std::string model_path;
    std::string mu;
    std::string nu;
    std::string policy = "random"; ///< solve | random | fixed:<u>
    std::size_t grid = 40;
    std::optional<std::size_t> horizon;
    std::optional<std::size_t> samples;
    std::uint64_t seed = 1;
    std::string criterion = "discounted";
    std::string method = "monte_carlo";
    std::string out;
};

std::string num(double v) { return fmt::format("{:.17g}", v); }

json estimate_json(const Estimate& e) { return {{"value", e.value}, {"std_error", e.std_error}}; }

json belief_json(const Belief& b) { return json(std::vector<double>(b.probs().begin(), b.probs().end())); }

void write_file(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path(), ec);
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot write " + path.string());
    f << text;
    if (!f)
        throw IoError("write failed for " + path.string());
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!doc.is_object())
        throw ParseError(path.string() + ": config must be a JSON object");

    ExperimentConfig c;
    const fs::path base = path.parent_path();
    for (const auto& [key, value] : doc.items()) {
        try {
            if (key == "model") {
                const fs::path p = value.get<std::string>();
                c.model_path = (p.is_relative() ? base / p : p).string();
            } else if (key == "mu") {
                c.mu = value.get<std::string>();
            } else if (key == "nu") {
                c.nu = value.get<std::string>();
            } else if (key == "policy") {
                c.policy = value.get<std::string>();
            } else if (key == "grid") {
                c.grid = value.get<std::size_t>();
            } else if (key == "horizon") {
                c.horizon = value.get<std::size_t>();
            } else if (key == "samples") {
                c.samples = value.get<std::size_t>();
            } else if (key == "seed") {
                c.seed = value.get<std::uint64_t>();
            } else if (key == "criterion") {
                c.criterion = value.get<std::string>();
            } else if (key == "method") {
                c.method = value.get<std::string>();
            } else if (key == "out") {
                c.out = value.get<std::string>();
            } else {
                throw ParseError("unknown config field \"" + key + "\"");
            }
        } catch (const json::type_error& e) {
            throw ParseError(path.string() + ": field \"" + key + "\": " + e.what());
        }
    }
    return c;
}

/// Flag values as parsed; only options that were actually given override
/// the config file.
struct ExperimentFlags {
    std::string config;
    ExperimentConfig values;
    std::vector<std::pair<CLI::Option*, void (*)(ExperimentConfig&, const ExperimentConfig&)>> options;
};

template <auto Member>
void copy_member(ExperimentConfig& dst, const ExperimentConfig& src) {
    dst.*Member = src.*Member;
}

void add_experiment_flags(CLI::App& cmd, ExperimentFlags& f, bool robustness) {
    auto& v = f.values;
    cmd.add_option("--config", f.config, "JSON file with experiment settings");
    f.options.emplace_back(cmd.add_option("--model", v.model_path, "model JSON file"),
                           &copy_member<&ExperimentConfig::model_path>);
    f.options.emplace_back(cmd.add_option("--mu", v.mu, "true prior, e.g. 0.3,0.7"),
                           &copy_member<&ExperimentConfig::mu>);
    f.options.emplace_back(cmd.add_option("--nu", v.nu, "design prior, e.g. 0.5,0.5"),
                           &copy_member<&ExperimentConfig::nu>);
    f.options.emplace_back(cmd.add_option("--grid", v.grid, "belief grid resolution k"),
                           &copy_member<&ExperimentConfig::grid>);
    f.options.emplace_back(cmd.add_option("--horizon", v.horizon, "time horizon"),
                           &copy_member<&ExperimentConfig::horizon>);
    f.options.emplace_back(cmd.add_option("--samples", v.samples, "Monte Carlo samples"),
                           &copy_member<&ExperimentConfig::samples>);
    f.options.emplace_back(cmd.add_option("--seed", v.seed, "random seed"),
                           &copy_member<&ExperimentConfig::seed>);
    f.options.emplace_back(cmd.add_option("--out", v.out, "output directory"),
                           &copy_member<&ExperimentConfig::out>);
    if (robustness) {
        f.options.emplace_back(
            cmd.add_option("--criterion", v.criterion, "discounted or average")
                ->check(CLI::IsMember({"discounted", "average"})),
            &copy_member<&ExperimentConfig::criterion>);
    } else {
        f.options.emplace_back(cmd.add_option("--policy", v.policy, "solve, random or fixed:<u>"),
                               &copy_member<&ExperimentConfig::policy>);
        f.options.emplace_back(
            cmd.add_option("--method", v.method, "enumerate or monte_carlo")
                ->check(CLI::IsMember({"enumerate", "monte_carlo"})),
            &copy_member<&ExperimentConfig::method>);
    }
}

ExperimentConfig resolve(const ExperimentFlags& f) {
    ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
    for (const auto& [opt, copy] : f.options)
        if (opt->count() > 0)
            copy(c, f.values);
    if (c.model_path.empty())
        throw ParseError("no model given (use --model or a config file)");
    if (c.mu.empty() || c.nu.empty())
        throw ParseError("both --mu and --nu are required");
    return c;
}

struct Experiment {
    PomdpModel model;
    Belief mu;
    Belief nu;
};

Experiment open_experiment(const ExperimentConfig& c) {
    PomdpModel model = load_model(c.model_path);
    Belief mu = Belief::parse(c.mu);
    Belief nu = Belief::parse(c.nu);
    if (mu.size() != model.num_states() || nu.size() != model.num_states())
        throw ParseError(fmt::format("priors must have {} entries", model.num_states()));
    require_absolutely_continuous(mu, nu);
    return {std::move(model), std::move(mu), std::move(nu)};
}

std::unique_ptr<Policy> make_policy(const ExperimentConfig& c, const Experiment& e) {
    if (c.policy == "random")
        return std::make_unique<HistoryHashPolicy>(e.model.num_actions(), c.seed);
    if (c.policy == "solve") {
        auto table =
            std::make_shared<const BeliefPolicy>(value_iteration_discounted(e.model, c.grid));
        return std::make_unique<BeliefFeedbackPolicy>(e.model, std::move(table), e.nu);
    }
    if (c.policy.rfind("fixed:", 0) == 0) {
        std::size_t u = 0;
        try {
            std::size_t used = 0;
            u = std::stoul(c.policy.substr(6), &used);
            if (used != c.policy.size() - 6)
                throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ParseError("bad policy \"" + c.policy + "\"");
        }
        if (u >= e.model.num_actions())
            throw ParseError(fmt::format("fixed action {} out of range", u));
        return std::make_unique<FixedActionPolicy>(u);
    }
    throw ParseError("unknown policy \"" + c.policy + "\" (expected solve, random or fixed:<u>)");
}

int cmd_validate(const std::string& path, std::ostream& out) {
    const ModelData data = read_model_data(path);
    const auto violations = validate(data);
    if (!violations.empty()) {
        out << "invalid model " << path << '\n';
        for (const auto& v : violations)
            out << "  " << v.to_string() << '\n';
        return kExitFailure;
    }
    out << fmt::format("valid model {}: {} states, {} observations, {} actions, discount {}\n",
                       path, data.num_states, data.num_obs, data.num_actions, data.discount);
    return kExitOk;
}

int cmd_analyze(const std::string& path, bool as_json, const std::string& out_dir,
                std::ostream& out) {
    const PomdpModel model = load_model(path);
    const ContractionReport c = contraction_report(model);
    const ObservabilityReport o = observability_report(model);

    json doc;
    doc["model"] = path;
    doc["num_states"] = model.num_states();
    doc["num_obs"] = model.num_obs();
    doc["num_actions"] = model.num_actions();
    doc["discount"] = model.discount();
    doc["delta_T"] = c.delta_T_per_action;
    doc["delta_T_inf"] = c.delta_T_inf;
    doc["delta_Q"] = c.delta_Q;
    doc["alpha"] = c.alpha;
    doc["exponentially_stable"] = c.exponentially_stable;
    doc["rank_Q"] = o.rank_Q;
    doc["observable"] = o.observable;
    doc["worst_indicator_residual"] = o.worst_residual;
    doc["worst_g_sup_norm"] = o.worst_g_sup_norm;
    const std::string text = doc.dump(2) + "\n";
    if (!out_dir.empty())
        write_file(fs::path(out_dir) / "analysis.json", text);

    if (as_json) {
        out << text;
        return kExitOk;
    }
    out << fmt::format("model {}: {} states, {} observations, {} actions, discount {}\n", path,
                       model.num_states(), model.num_obs(), model.num_actions(), model.discount());
    for (std::size_t u = 0; u < c.delta_T_per_action.size(); ++u)
        out << fmt::format("{:<18}{}\n", fmt::format("delta(T[{}])", u), c.delta_T_per_action[u]);
    out << fmt::format("{:<18}{}\n", "delta_min(T)", c.delta_T_inf);
    out << fmt::format("{:<18}{}\n", "delta(Q)", c.delta_Q);
    out << fmt::format("{:<18}{}\n", "alpha", c.alpha);
    out << fmt::format("{:<18}{}\n", "filter stability",
                       c.exponentially_stable ? "exponential in expectation (alpha < 1)"
                                              : "not certified (alpha >= 1)");
    out << fmt::format("{:<18}{} of {}\n", "rank(Q)", o.rank_Q, model.num_states());
    out << fmt::format("{:<18}{}\n", "observability",
                       o.observable ? "one-step observable" : "not observable");
    out << fmt::format("{:<18}{}\n", "worst residual", o.worst_residual);
    return kExitOk;
}

int cmd_stability(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
    const Experiment e = open_experiment(c);
    const auto policy = make_policy(c, e);
    const std::size_t horizon = c.horizon.value_or(25);
    EstimationMethod method = Enumerate{};
    if (c.method == "monte_carlo")
        method = MonteCarlo{c.samples.value_or(100000), c.seed};
    const StabilityTrace trace =
        filter_stability_trace(e.model, e.mu, e.nu, *policy, horizon, method);
    const ContractionReport contraction = contraction_report(e.model);
    const auto envelope = contraction_envelope(contraction.alpha, horizon);

    std::string csv = "n,E_tv,E_tv_se,envelope_2alpha_n,relative_entropy,pinsker_rhs\n";
    std::size_t violations = 0;
    for (const auto& p : trace) {
        const double env = envelope[p.n];
        const double pinsker = std::sqrt(2.0 * p.relative_entropy.value);
        csv += fmt::format("{},{},{},{},{},{}\n", p.n, num(p.tv.value), num(p.tv.std_error),
                           num(env), num(p.relative_entropy.value), num(pinsker));
        if (p.tv.value > env + 3.0 * p.tv.std_error + 1e-10) {
            ++violations;
            err << fmt::format("envelope violated at n={}: E_tv={} > 2 alpha^n={} (+3 SE)\n", p.n,
                               num(p.tv.value), num(env));
        }
    }
    if (c.out.empty())
        out << csv;
    else
        write_file(fs::path(c.out) / "stability.csv", csv);
    if (violations > 0)
        return kExitFailure;
    return kExitOk;
}

json decomposition_json(const CostDecomposition& d) {
    return {{"n", d.n},
            {"transient", estimate_json(d.transient)},
            {"strategic", estimate_json(d.strategic)},
            {"approximation", estimate_json(d.approximation)},
            {"total", estimate_json(d.total)},
            {"residual", estimate_json(d.residual)}};
}

int cmd_robustness(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
    const Experiment e = open_experiment(c);
    RobustnessSettings s;
    s.criterion = parse_criterion(c.criterion);
    s.grid_resolution = c.grid;
    s.refined_resolution = 2 * c.grid;
    s.horizon = c.horizon.value_or(0);
    s.samples = c.samples.value_or(20000);
    s.seed = c.seed;
    const RobustnessReport r = robustness_gap(e.model, e.mu, e.nu, s);

    json doc;
    doc["model"] = c.model_path;
    doc["criterion"] = std::string(to_string(r.criterion));
    doc["mu"] = belief_json(e.mu);
    doc["nu"] = belief_json(e.nu);
    doc["tv"] = r.tv;
    doc["cost_sup"] = r.cost_sup;
    doc["discount"] = r.discount;
    doc["horizon"] = r.horizon;
    doc["samples"] = r.samples;
    doc["seed"] = r.seed;
    doc["cost_mismatched"] = estimate_json(r.cost_mismatched);
    doc["cost_matched"] = estimate_json(r.cost_matched);
    doc["measured_gap"] = estimate_json(r.measured_gap);
    if (r.criterion == Criterion::discounted)
        doc["truncation_bound"] = r.truncation_bound;
    else
        doc["convergence_gap"] = r.convergence_gap;
    doc["grid"] = {{"resolution", s.grid_resolution},
                   {"refined_resolution", s.refined_resolution},
                   {"value_iteration_sweeps", r.value_iteration_sweeps},
                   {"slack", r.grid_slack}};

    json bounds;
    bounds["continuity_discounted"] = bound_continuity_discounted(e.model, e.mu, e.nu);
    bounds["continuity_average"] = bound_continuity_average(e.model, e.mu, e.nu);
    bounds["continuity"] = r.continuity_bound;
    bounds["span_seminorm"] = r.span_estimate;
    if (r.prior_independent) {
        const auto& p = *r.prior_independent;
        bounds["prior_independent"] = {{"rho", p.rho},
                                       {"n_star", p.closed_form ? json(p.n_star) : json(nullptr)},
                                       {"closed_form", p.closed_form},
                                       {"n", p.n},
                                       {"f_max", p.f_max},
                                       {"bound", p.bound},
                                       {"effective", p.effective},
                                       {"trivial", p.trivial},
                                       {"clamped", p.clamped}};
    } else {
        bounds["prior_independent"] = nullptr;
    }
    doc["bounds"] = std::move(bounds);
    doc["contraction"] = {{"delta_T", r.contraction.delta_T_per_action},
                          {"delta_T_inf", r.contraction.delta_T_inf},
                          {"delta_Q", r.contraction.delta_Q},
                          {"alpha", r.contraction.alpha},
                          {"exponentially_stable", r.contraction.exponentially_stable}};
    if (!r.decomposition.empty())
        doc["decomposition"] = decomposition_json(r.decomposition.at(r.decomposition_n));
    else
        doc["decomposition"] = nullptr;
    const std::string report = doc.dump(2) + "\n";

    if (c.out.empty()) {
        out << report;
        return kExitOk;
    }
    write_file(fs::path(c.out) / "robustness.json", report);
    if (r.decomposition.empty()) {
        err << "decomposition is defined for the discounted criterion only; no CSV written\n";
        return kExitOk;
    }
    std::string csv = "n,transient,transient_se,strategic,strategic_se,approximation,"
                      "approximation_se,total,total_se,residual,residual_se,measured_gap,"
                      "measured_gap_se\n";
    for (const auto& d : r.decomposition)
        csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", d.n, num(d.transient.value),
                           num(d.transient.std_error), num(d.strategic.value),
                           num(d.strategic.std_error), num(d.approximation.value),
                           num(d.approximation.std_error), num(d.total.value),
                           num(d.total.std_error), num(d.residual.value),
                           num(d.residual.std_error), num(r.measured_gap.value),
                           num(r.measured_gap.std_error));
    write_file(fs::path(c.out) / "decomposition.csv", csv);
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Filter stability and prior-robustness toolkit for finite POMDPs",
                 "filterstab-cli"};
    app.require_subcommand(1);

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "check a model file");
    validate_cmd->add_option("--model", validate_path, "model JSON file")->required();

    std::string analyze_path, analyze_out;
    bool analyze_json = false;
    auto* analyze_cmd = app.add_subcommand("analyze", "contraction and observability report");
    analyze_cmd->add_option("--model", analyze_path, "model JSON file")->required();
    analyze_cmd->add_flag("--json", analyze_json, "print JSON instead of text");
    analyze_cmd->add_option("--out", analyze_out, "directory for analysis.json");

    ExperimentFlags stability_flags;
    auto* stability_cmd = app.add_subcommand("stability", "expected filter distance versus n");
    add_experiment_flags(*stability_cmd, stability_flags, false);

    ExperimentFlags robustness_flags;
    auto* robustness_cmd = app.add_subcommand("robustness", "cost of acting on the wrong prior");
    add_experiment_flags(*robustness_cmd, robustness_flags, true);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        if (const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands()[0])
            err << sub->help();
        return kExitIoError;
    }

    try {
        if (*validate_cmd)
            return cmd_validate(validate_path, out);
        if (*analyze_cmd)
            return cmd_analyze(analyze_path, analyze_json, analyze_out, out);
        if (*stability_cmd)
            return cmd_stability(resolve(stability_flags), out, err);
        if (*robustness_cmd)
            return cmd_robustness(resolve(robustness_flags), out, err);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIoError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIoError;
    } catch (const ModelError& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitIoError;
}

} // namespace filterstab::cli
