#include "jumpeuler/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "jumpeuler/errors.hpp"

namespace jumpeuler {
namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& field, const std::string& detail) {
    throw InvalidParameter(field, detail);
}

double require_number(const json& j, const std::string& field) {
    if (!j.is_number()) bad_field(field, "expected a number");
    return j.get<double>();
}

OuJumpSpec parse_ou(const json& j) {
    OuJumpSpec spec;
    for (auto& [key, value] : j.items()) {
        if (key == "type") continue;
        if (key == "A" || key == "mean_reversion") spec.mean_reversion = require_number(value, key);
        else if (key == "mu") spec.mu = require_number(value, key);
        else if (key == "sigma") spec.sigma = require_number(value, key);
        else if (key == "alpha") spec.alpha = require_number(value, key);
        else if (key == "lambda") spec.lambda = require_number(value, key);
        else if (key == "eta") spec.eta = require_number(value, key);
        else if (key == "T" || key == "horizon") spec.horizon = require_number(value, key);
        else if (key == "c1") {
            if (value.is_string() && value.get<std::string>() == "t") {
                spec.jump_c1 = [](double t) { return t; };
            } else if (value.is_number()) {
                const double c = value.get<double>();
                spec.jump_c1 = [c](double) { return c; };
            } else {
                bad_field("model.c1", "expected \"t\" or a constant number");
            }
        } else {
            bad_field("model." + key, "unknown field for ou-jump");
        }
    }
    return spec;
}

MertonSpec parse_merton(const json& j) {
    MertonSpec spec;
    for (auto& [key, value] : j.items()) {
        if (key == "type") continue;
        if (key == "mu") spec.mu = require_number(value, key);
        else if (key == "sigma") spec.sigma = require_number(value, key);
        else if (key == "alpha") spec.alpha = require_number(value, key);
        else if (key == "lambda") spec.lambda = require_number(value, key);
        else if (key == "eta") spec.eta = require_number(value, key);
        else if (key == "T" || key == "horizon") spec.horizon = require_number(value, key);
        else bad_field("model." + key, "unknown field for merton");
    }
    return spec;
}

void parse_model(const json& j, ExperimentConfig& config) {
    std::string type;
    const json* params = nullptr;
    if (j.is_string()) {
        type = j.get<std::string>();
    } else if (j.is_object()) {
        if (!j.contains("type") || !j["type"].is_string())
            bad_field("model.type", "inline model spec needs a \"type\" string");
        type = j["type"].get<std::string>();
        params = &j;
    } else {
        bad_field("model", "expected a preset name or an inline object");
    }
    static const json empty = json::object();
    const json& p = params ? *params : empty;
    if (type == "ou-jump") {
        config.model = parse_ou(p);
        config.model_name = "ou-jump";
    } else if (type == "merton") {
        config.model = parse_merton(p);
        config.model_name = "merton";
    } else {
        bad_field("model", "unknown model '" + type + "' (presets: ou-jump, merton)");
    }
}

}  // namespace

std::vector<int> expand_schedule(const GeometricSchedule& rule) {
    if (rule.count < 1) throw InvalidParameter("schedule.count", "must be >= 1");
    if (!(rule.base >= 1.0)) throw InvalidParameter("schedule.base", "must be >= 1");
    if (!(rule.growth > 0.0)) throw InvalidParameter("schedule.growth", "must be > 0");
    std::vector<int> out;
    out.reserve(rule.count);
    for (int i = 0; i < rule.count; ++i) {
        const double m =
            std::floor(rule.base * std::pow(rule.growth, rule.exponent_step * i));
        if (!(m >= 1.0) || m > 1e9) throw InvalidParameter("schedule", "M out of range");
        out.push_back(static_cast<int>(m));
    }
    return out;
}

std::int64_t steps_for(const StepRule& rule, int truncation_dim) {
    const double n = std::floor(rule.scale * std::pow(static_cast<double>(truncation_dim),
                                                      rule.exponent));
    if (!(n >= 1.0) || n > 9e15) throw InvalidParameter("n_rule", "step count out of range");
    return static_cast<std::int64_t>(n);
}

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InvalidParameter("config", e.what());
    }
    if (!root.is_object()) throw InvalidParameter("config", "top level must be an object");

    ExperimentConfig config;
    bool have_schedule = false;
    for (auto& [key, value] : root.items()) {
        if (key == "model") {
            parse_model(value, config);
        } else if (key == "schedule") {
            have_schedule = true;
            if (value.is_array()) {
                config.schedule.clear();
                for (const auto& m : value) {
                    if (!m.is_number_integer() || m.get<std::int64_t>() < 1)
                        bad_field("schedule", "entries must be integers >= 1");
                    config.schedule.push_back(m.get<int>());
                }
            } else if (value.is_object()) {
                GeometricSchedule rule;
                if (value.contains("base")) rule.base = require_number(value["base"], "schedule.base");
                if (value.contains("growth"))
                    rule.growth = require_number(value["growth"], "schedule.growth");
                if (value.contains("exponent_step"))
                    rule.exponent_step =
                        require_number(value["exponent_step"], "schedule.exponent_step");
                if (value.contains("count")) {
                    if (!value["count"].is_number_integer())
                        bad_field("schedule.count", "expected an integer");
                    rule.count = value["count"].get<int>();
                }
                config.schedule = expand_schedule(rule);
            } else {
                bad_field("schedule", "expected a list of M values or a geometric rule");
            }
        } else if (key == "n_rule") {
            if (!value.is_object()) bad_field("n_rule", "expected {scale, exponent}");
            if (value.contains("scale"))
                config.n_rule.scale = require_number(value["scale"], "n_rule.scale");
            if (value.contains("exponent"))
                config.n_rule.exponent = require_number(value["exponent"], "n_rule.exponent");
        } else if (key == "n_list") {
            if (!value.is_array()) bad_field("n_list", "expected a list of step counts");
            std::vector<std::int64_t> steps;
            for (const auto& n : value) {
                if (!n.is_number_integer() || n.get<std::int64_t>() < 1)
                    bad_field("n_list", "entries must be integers >= 1");
                steps.push_back(n.get<std::int64_t>());
            }
            config.explicit_steps = std::move(steps);
        } else if (key == "K" || key == "trajectories") {
            if (!value.is_number_integer() || value.get<std::int64_t>() < 2)
                bad_field(key, "expected an integer >= 2");
            config.trajectories = value.get<std::int64_t>();
        } else if (key == "p" || key == "order_p") {
            config.order_p = require_number(value, key);
            if (!(config.order_p >= 2.0)) bad_field(key, "must be >= 2");
        } else if (key == "seed") {
            if (!value.is_number_integer()) bad_field("seed", "expected an integer");
            config.seed = value.get<std::uint64_t>();
        } else if (key == "estimator") {
            const std::string s = value.is_string() ? value.get<std::string>() : "";
            if (s == "coupled") config.estimator = EstimatorKind::Coupled;
            else if (s == "exact-reference") config.estimator = EstimatorKind::ExactReference;
            else bad_field("estimator", "expected \"coupled\" or \"exact-reference\"");
        } else if (key == "multipliers") {
            if (!value.is_array() || value.size() != 2 || !value[0].is_number_integer() ||
                !value[1].is_number_integer())
                bad_field("multipliers", "expected [fine_M_mult, fine_n_mult]");
            config.fine_dim_mult = value[0].get<int>();
            config.fine_step_mult = value[1].get<int>();
            config.reference_dim_mult = config.fine_dim_mult;
            if (config.fine_dim_mult < 1 || config.fine_step_mult < 1)
                bad_field("multipliers", "must be >= 1");
        } else if (key == "reference_mult") {
            if (!value.is_number_integer() || value.get<int>() < 1)
                bad_field("reference_mult", "expected an integer >= 1");
            config.reference_dim_mult = value.get<int>();
        } else if (key == "workers") {
            if (value.is_string() && value.get<std::string>() == "auto") {
                config.workers = 0;
            } else if (value.is_number_integer() && value.get<int>() >= 1) {
                config.workers = value.get<int>();
            } else {
                bad_field("workers", "expected \"auto\" or an integer >= 1");
            }
        } else if (key == "noise") {
            const std::string s = value.is_string() ? value.get<std::string>() : "";
            if (s == "per-dim") config.noise = NoisePath::PerDim;
            else if (s == "collapsed") config.noise = NoisePath::Collapsed;
            else bad_field("noise", "expected \"per-dim\" or \"collapsed\"");
        } else {
            bad_field(key, "unknown config field");
        }
    }
    if (!have_schedule) bad_field("schedule", "missing");
    if (config.schedule.empty()) bad_field("schedule", "must be nonempty");
    if (config.explicit_steps && config.explicit_steps->size() != config.schedule.size())
        bad_field("n_list", "length must match the schedule");
    if (config.estimator == EstimatorKind::ExactReference && config.noise == NoisePath::Collapsed)
        bad_field("noise", "the exact-reference estimator is per-dim only");
    return config;
}

ModelSpec build_model(const ExperimentConfig& config) {
    if (const auto* ou = std::get_if<OuJumpSpec>(&config.model)) return make_ou_model(*ou);
    return make_merton_model(std::get<MertonSpec>(config.model));
}

ConvergenceTable run_experiment(const ExperimentConfig& config, std::ostream* log) {
    const ModelSpec model = build_model(config);
    validate_model(model);
    const double alpha =
        std::visit([](const auto& spec) { return spec.alpha; }, config.model);

    ConvergenceTable table;
    EstimatorOptions opts;
    opts.workers = config.workers;
    opts.noise = config.noise;
    for (std::size_t i = 0; i < config.schedule.size(); ++i) {
        const int truncation = config.schedule[i];
        const std::int64_t steps =
            config.explicit_steps ? (*config.explicit_steps)[i] : steps_for(config.n_rule, truncation);
        const std::uint64_t row_seed = mix_seed(config.seed, static_cast<std::uint64_t>(i));
        const auto t0 = std::chrono::steady_clock::now();
        const ErrorEstimate est =
            config.estimator == EstimatorKind::Coupled
                ? mc_error_coupled(model, truncation, steps,
                                   {config.fine_dim_mult, config.fine_step_mult},
                                   config.trajectories, config.order_p, row_seed, opts)
                : mc_error_vs_reference(model, truncation, steps, config.reference_dim_mult,
                                        config.trajectories, config.order_p, row_seed, opts);
        table.rows.push_back({truncation, steps, est.cost, est.error, est.std_error});
        if (log) {
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            *log << "M=" << truncation << " n=" << steps << " cost=" << est.cost
                 << " error=" << est.error << " std_error=" << est.std_error << " (" << secs
                 << " s)\n";
        }
    }

    try {
        const auto [slope, intercept] = fit_loglog_slope(table.rows);
        table.slope = slope;
        table.intercept = intercept;
    } catch (const InvalidParameter&) {
        // fewer than 2 rows, or a zero error: slope stays undefined
    }
    const RatePrediction prediction = predict_rate(model.class_params, alpha);
    table.predicted_slope = prediction.slope;
    return table;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_csv(const ConvergenceTable& table, std::ostream& out) {
    out << "M,n,cost,error,std_error\n";
    for (const auto& row : table.rows) {
        out << row.truncation_dim << ',' << row.steps << ',' << format_double(row.cost) << ','
            << format_double(row.error) << ',' << format_double(row.std_error) << '\n';
    }
    auto footer = [&](const char* name, const std::optional<double>& v) {
        out << "# " << name << ',' << (v ? format_double(*v) : "undefined") << '\n';
    };
    footer("slope", table.slope);
    footer("intercept", table.intercept);
    footer("predicted_slope", table.predicted_slope);
}

}  // namespace jumpeuler
