#pragma once

// Configuration-driven experiment runner: a schedule of truncation dimensions
// M_i (explicit list or geometric rule floor(base * growth^(i*exponent_step))),
// a step rule n = floor(scale * M^exponent), and one estimator per row.
// Emits a ConvergenceTable and a machine-readable CSV:
//
//   M,n,cost,error,std_error
//   ...one row per schedule entry...
//   # slope,<v|undefined>
//   # intercept,<v|undefined>
//   # predicted_slope,<v|undefined>
//
// Numbers are written locale-independently at full round-trip precision
// (17 significant digits). Output is byte-identical for any worker count.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "jumpeuler/analysis.hpp"
#include "jumpeuler/builtin_models.hpp"
#include "jumpeuler/estimator.hpp"

namespace jumpeuler {

struct GeometricSchedule {
    double base = 20.0;
    double growth = 1.3;
    double exponent_step = 0.25;  // M_i = floor(base * growth^(i*exponent_step))
    int count = 12;
};

struct StepRule {
    double scale = 10.0;
    double exponent = 1.4;  // n = floor(scale * M^exponent)
};

enum class EstimatorKind { Coupled, ExactReference };

struct ExperimentConfig {
    std::variant<OuJumpSpec, MertonSpec> model = OuJumpSpec{};
    std::string model_name = "ou-jump";
    std::vector<int> schedule;  // resolved M values, nonempty
    StepRule n_rule;
    std::optional<std::vector<std::int64_t>> explicit_steps;  // overrides n_rule
    std::int64_t trajectories = 10000;  // K
    double order_p = 2.0;
    std::uint64_t seed = 1;
    EstimatorKind estimator = EstimatorKind::Coupled;
    int fine_dim_mult = 10;
    int fine_step_mult = 100;
    int reference_dim_mult = 10;
    int workers = 0;  // 0 = auto
    NoisePath noise = NoisePath::PerDim;
};

std::vector<int> expand_schedule(const GeometricSchedule& rule);
std::int64_t steps_for(const StepRule& rule, int truncation_dim);

// Parses the JSON config text; throws InvalidParameter naming the offending
// field (parse errors carry the byte position).
ExperimentConfig parse_config(const std::string& json_text);

ModelSpec build_model(const ExperimentConfig& config);

// Rows in schedule order; per-row seed derived as mix_seed(seed, row index).
// Slope fitted when >= 2 rows and all errors are positive. `log`, when given,
// receives one progress line per row.
ConvergenceTable run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

void write_csv(const ConvergenceTable& table, std::ostream& out);

// Locale-independent full-precision formatting used for all CSV values.
std::string format_double(double v);

}  // namespace jumpeuler
