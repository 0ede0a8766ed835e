#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mkv/models.hpp"
#include "mkv/rate_analysis.hpp"
#include "mkv/time_grid.hpp"

namespace mkv {

struct ModelConfig {
  std::string name = "kuramoto";
  double c = 0.5;          // constant
  double gain = 1.0;       // media_drift, local_sine
  double strength = 1.0;   // local_sine
  KuramotoParams kuramoto;
  GlParams gl;
  Diffusion diffusion;
  InitLaw init = ConstantInit{};
  MediaLaw media = PointMassMedia{{0.0}};
  std::optional<double> f_sup;  // declared overrides of the built-in bounds
  std::optional<double> f_sl;
  bool audit = false;
  std::size_t drift_atoms = 0;  // 0: the drift reads every atom
  bool operator==(const ModelConfig&) const = default;
};

struct GridConfig {
  double tau = 0.0;
  double T = 1.0;
  double dt = 0.01;
  bool operator==(const GridConfig&) const = default;
};

struct SolverConfig {
  std::size_t M = 1000;
  double tol = 0.02;
  std::size_t max_iter = 50;
  std::size_t lp_subsample = 200;
  bool operator==(const SolverConfig&) const = default;
};

struct AnalysisConfig {
  std::vector<std::size_t> N_list{250, 500, 1000, 2000};
  std::size_t replicates = 3;
  std::vector<double> alphas{-2.0, -1.0, 1.0, 2.0};
  std::vector<double> checkpoints{0.25, 0.5, 0.75, 1.0};
  std::size_t samples = 20000;     // Monte Carlo sample count
  std::size_t pilot_size = 200;    // frozen cloud for Girsanov checks
  std::string simulate_mode = "coupled";  // coupled | decoupled | reference
  std::size_t simulate_n = 1000;
  std::size_t bl_size = 200;
  std::size_t dictionary_size = 64;
  bool lp_dump = false;
  std::string compare_model;      // rate: drift used for D^nu, empty for the same model
  std::size_t residual_subsample = 400;
  std::size_t residual_repeats = 3;
  std::vector<TestFunctional> tests;
  std::vector<ScalarFn> pde_phis{ScalarFn::sine(), ScalarFn::cosine(), ScalarFn::gauss()};
  std::vector<double> pde_times{0.5, 1.0};
  std::optional<double> pde_bandwidth;
  double sigma = 3.0;  // pass flags use sigma standard errors
  bool operator==(const AnalysisConfig&) const = default;
};

struct ExperimentConfig {
  ModelConfig model;
  GridConfig grid;
  SolverConfig solver;
  AnalysisConfig analysis;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  /// Field paths filled from defaults, in parse order.
  std::vector<std::string> defaults_applied;
  bool operator==(const ExperimentConfig&) const = default;
};

std::vector<TestFunctional> default_test_functionals();

/// Validates and fills defaults. Throws SchemaError (message starts with the
/// field path) or BoundsError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config(const nlohmann::json& j);
inline ExperimentConfig parse_config(const char* text) { return parse_config(std::string(text)); }
/// Fully explicit document; `defaults_applied` marks the fields that were defaulted.
nlohmann::json serialize_config(const ExperimentConfig& config);

nlohmann::json scalar_fn_to_json(const ScalarFn& f);
ScalarFn scalar_fn_from_json(const nlohmann::json& j, const std::string& path);

GridPtr build_grid(const ExperimentConfig& config);
ModelSpec build_model(const ExperimentConfig& config);
ModelSpec build_named_model(const std::string& name, const ExperimentConfig& config);

}  // namespace mkv
