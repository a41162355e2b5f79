#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qnpg/environment.hpp"
#include "qnpg/estimators.hpp"
#include "qnpg/optimizer.hpp"

namespace qnpg {

/// Flat experiment configuration. Every key has a CLI flag of the same name
/// with '_' spelled '-'.
///
///   gamma, sigma0_sq, sigma_sq            scalar LQR
///   theta0                                initial parameters (empty: command default)
///   method                                gd | ngd | qn | qn_reg | all
///   alpha                                 step size (null: per-method default)
///   beta, lambda_floor, iters             optimizer
///   curvature                             oracle | estimated
///   n_outer, horizon, n_q, fd_step        estimator budget
///   workers                               estimator threads (0: hardware)
///   theta_min, theta_max, points          scan-hessian grid
///   seed, seeds                           master seed and number of seeds
///   cp_gamma, cp_dt, cp_substeps, ...     cart-pendulum model
///   eval_rollouts, eval_horizon, eval_seed  fixed J_est budget
///   randomize_theta0, theta0_box          draw θ0 per seed within ±box of theta0
struct ExperimentConfig {
  double gamma = 0.9;
  double sigma0_sq = 0.1;
  double sigma_sq = 0.1;

  std::vector<double> theta0;
  std::string method = "all";
  std::optional<double> alpha;
  double beta = 0.0;
  double lambda_floor = 1e-3;
  int iters = 20;
  std::string curvature = "oracle";

  int n_outer = 2000;
  int horizon = 80;
  int n_q = 50;
  double fd_step = 1e-2;
  int workers = 0;

  double theta_min = 0.2;
  double theta_max = 1.5;
  int points = 50;

  std::uint64_t seed = 1;
  int seeds = 1;

  CartPoleConfig cartpole;
  int eval_rollouts = 200;
  int eval_horizon = 200;
  std::uint64_t eval_seed = 12345;
  bool randomize_theta0 = false;
  double theta0_box = 0.0;

  LqrConfig lqr() const;
  RolloutPlan plan() const;
  std::vector<Method> methods() const;
  double alpha_for(Method m) const;
  std::vector<std::uint64_t> seed_list() const;

  /// Throws ConfigError naming the first offending key.
  void validate() const;
};

/// Defaults of learn-cartpole: the shipped stabilizing gain and budget.
ExperimentConfig cartpole_defaults();

/// Default θ0 of learn-cartpole.
std::vector<double> default_cartpole_theta0();

nlohmann::json to_json(const ExperimentConfig& cfg);

/// Overlays the keys present in `j` onto `base`. Unknown keys and wrong
/// types throw ConfigError.
ExperimentConfig apply_json(ExperimentConfig base, const nlohmann::json& j);

/// Reads a flat config, or a run manifest (its "config" object), from disk.
nlohmann::json load_config_json(const std::filesystem::path& path);

/// Parses "1.5" or "0.1,-2,3" into numbers.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace qnpg
