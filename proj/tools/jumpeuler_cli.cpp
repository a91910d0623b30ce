// Command-line experiment runner.
//
//   jumpeuler run      --config cfg.json [--seed S] [--workers W] [--out file]
//   jumpeuler plan     --epsilon E --gamma G (--alpha A | --delta-csv file) [--rate-constant K]
//   jumpeuler simulate --model ou-jump|merton [--config cfg.json] -M ... -n ...
//                      [--seed S] [--count C] [--workers W] [--out file]
//
// Exit codes: 0 success, 2 configuration error, 3 runtime (trajectory) failure.

#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jumpeuler/analysis.hpp"
#include "jumpeuler/errors.hpp"
#include "jumpeuler/experiment.hpp"

namespace {

using namespace jumpeuler;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidParameter("config", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Writes to the --out path when given, stdout otherwise.
struct Sink {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file.open(path, std::ios::binary);
            if (!file) throw InvalidParameter("out", "cannot open '" + path + "'");
            stream = &file;
        }
    }
};

int cmd_run(const std::string& config_path, std::int64_t seed_override, int workers_override,
            const std::string& out_path) {
    ExperimentConfig config = parse_config(slurp(config_path));
    if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);
    if (workers_override > 0) config.workers = workers_override;
    const ConvergenceTable table = run_experiment(config, &std::cerr);
    Sink sink(out_path);
    write_csv(table, *sink.stream);
    return kExitOk;
}

// Step function through a tabulated, strictly decreasing delta: delta(M) is
// the value at the largest tabulated M' <= M (the conservative reading, so
// planner answers always land on tabulated rows); M below the table is
// treated as unbounded.
std::function<double(std::int64_t)> load_delta_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("delta-csv", "cannot open '" + path + "'");
    auto rows = std::make_shared<std::vector<std::pair<std::int64_t, double>>>();
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::int64_t m;
        double d;
        char comma;
        if (!(ss >> m >> comma >> d) || comma != ',')
            throw InvalidParameter("delta-csv", "expected lines 'M,delta': " + line);
        if (!rows->empty() && (m <= rows->back().first || d >= rows->back().second))
            throw InvalidParameter("delta-csv", "rows must be increasing in M, decreasing in delta");
        rows->emplace_back(m, d);
    }
    if (rows->empty()) throw InvalidParameter("delta-csv", "no rows");
    return [rows](std::int64_t m) {
        if (m > rows->back().first)
            throw InvalidParameter("delta-csv", "M beyond the tabulated range");
        double value = std::numeric_limits<double>::infinity();
        for (const auto& [tab_m, tab_d] : *rows) {
            if (tab_m > m) break;
            value = tab_d;
        }
        return value;
    };
}

int cmd_plan(double epsilon, double gamma, double alpha, const std::string& delta_csv,
             double rate_constant) {
    std::function<double(std::int64_t)> delta;
    if (!delta_csv.empty()) {
        delta = load_delta_table(delta_csv);
    } else {
        if (!(alpha >= 1.0))
            throw InvalidParameter("alpha", "give --alpha >= 1 or --delta-csv");
        delta = [alpha](std::int64_t m) { return power_tail_delta(alpha, m); };
    }
    const auto [truncation, steps] = optimal_params(epsilon, gamma, delta, rate_constant);
    std::cout << "epsilon: " << format_double(epsilon) << '\n'
              << "gamma: " << format_double(gamma) << '\n'
              << "M: " << truncation << '\n'
              << "n: " << steps << '\n'
              << "cost: " << format_double(informational_cost(truncation, steps)) << '\n';
    if (delta_csv.empty() && gamma == 0.5) {
        // Power-family cost exponent: cost = Theta((1/eps)^(4 alpha / (2 alpha - 1))).
        std::cout << "cost_exponent: " << format_double(4.0 * alpha / (2.0 * alpha - 1.0))
                  << '\n';
    }
    return kExitOk;
}

int cmd_simulate(const std::string& model_name, const std::string& config_path, int truncation,
                 std::int64_t steps, std::int64_t seed, std::int64_t count, int workers,
                 const std::string& out_path) {
    ExperimentConfig config;
    if (!config_path.empty()) {
        // simulate only needs the model; tolerate configs without a schedule.
        auto json = nlohmann::json::parse(slurp(config_path), nullptr, false);
        if (json.is_discarded()) throw InvalidParameter("config", "not valid JSON");
        if (!json.contains("schedule")) json["schedule"] = {1};
        config = parse_config(json.dump());
    } else {
        std::ostringstream inline_cfg;
        inline_cfg << R"({"model": ")" << model_name << R"(", "schedule": [1]})";
        config = parse_config(inline_cfg.str());
    }
    const ModelSpec model = build_model(config);
    validate_model(model);
    const SchemeParams params{truncation, steps, model.horizon, config.order_p};

    std::vector<TerminalValue> results(static_cast<std::size_t>(count));
    parallel_for_index(count, workers, [&](std::int64_t l) {
        results[static_cast<std::size_t>(l)] =
            simulate_terminal(model, params, static_cast<std::uint64_t>(seed),
                              static_cast<std::uint64_t>(l));
    });

    Sink sink(out_path);
    std::ostream& out = *sink.stream;
    out << "trajectory";
    for (int c = 0; c < model.dim; ++c) out << ",x" << c;
    out << ",jumps\n";
    for (std::int64_t l = 0; l < count; ++l) {
        const auto& tv = results[static_cast<std::size_t>(l)];
        out << l;
        for (double v : tv.value) out << ',' << format_double(v);
        out << ',' << tv.jump_count << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Truncated-dimension randomized Euler simulation and benchmarks"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a convergence experiment from a JSON config");
    std::string run_config, run_out;
    std::int64_t run_seed = -1;
    int run_workers = 0;
    run->add_option("--config", run_config, "JSON config file")->required();
    run->add_option("--seed", run_seed, "override the config seed");
    run->add_option("--workers", run_workers, "override the worker count");
    run->add_option("--out", run_out, "CSV output path (default stdout)");

    auto* plan = app.add_subcommand("plan", "Optimal (M, n) for a target accuracy");
    double plan_eps = 0.0, plan_gamma = 0.5, plan_alpha = 0.0, plan_kc = 1.0;
    std::string plan_delta_csv;
    plan->add_option("--epsilon", plan_eps, "target accuracy")->required();
    plan->add_option("--gamma", plan_gamma, "step exponent min(rho1, rho2, 1/p)")->required();
    plan->add_option("--alpha", plan_alpha, "power-diffusion exponent (>= 1)");
    plan->add_option("--delta-csv", plan_delta_csv, "tabulated delta: lines 'M,delta'");
    plan->add_option("--rate-constant", plan_kc, "error-bound constant K (default 1)");

    auto* sim = app.add_subcommand("simulate", "Sample scheme terminal values to CSV");
    std::string sim_model = "ou-jump", sim_config, sim_out;
    int sim_truncation = 50;
    std::int64_t sim_steps = 2000, sim_seed = 1, sim_count = 1000;
    int sim_workers = 0;
    sim->add_option("--model", sim_model, "model preset: ou-jump or merton");
    sim->add_option("--config", sim_config, "JSON config supplying the model (overrides --model)");
    sim->add_option("-M,--truncation-dim", sim_truncation, "Wiener truncation dimension M");
    sim->add_option("-n,--steps", sim_steps, "step count n");
    sim->add_option("--seed", sim_seed, "stream base seed");
    sim->add_option("--count", sim_count, "number of trajectories");
    sim->add_option("--workers", sim_workers, "worker count (0 = auto)");
    sim->add_option("--out", sim_out, "CSV output path (default stdout)");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return cmd_run(run_config, run_seed, run_workers, run_out);
        if (plan->parsed())
            return cmd_plan(plan_eps, plan_gamma, plan_alpha, plan_delta_csv, plan_kc);
        return cmd_simulate(sim_model, sim_config, sim_truncation, sim_steps, sim_seed,
                            sim_count, sim_workers, sim_out);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    } catch (const TrajectoryFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const NonFiniteState& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const InvalidParameter& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}
