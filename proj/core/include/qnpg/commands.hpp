#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qnpg/csv.hpp"
#include "qnpg/experiment_config.hpp"
#include "qnpg/lqr_verification.hpp"
#include "qnpg/optimizer.hpp"

namespace qnpg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;

inline constexpr const char* kArtifactName = "qnpg";
std::string artifact_version();

/// <out>.manifest.json
std::filesystem::path manifest_path(const std::filesystem::path& csv_path);

nlohmann::json make_manifest(const std::string& command, const ExperimentConfig& cfg,
                             const std::vector<std::filesystem::path>& outputs,
                             double wall_seconds);

void print_report(const lqr::VerificationReport& report, std::ostream& out);

/// One row per grid point. Throws UnstableParameter if any grid point lies
/// outside the stability domain.
CsvTable scan_hessian_table(const ExperimentConfig& cfg);

struct LqrRun {
  Method method;
  std::uint64_t seed;
  LearningTrace trace;
};

/// Every selected method from the shared θ0. Oracle curvature runs once;
/// estimated curvature runs once per seed.
std::vector<LqrRun> run_lqr_experiment(const ExperimentConfig& cfg);
CsvTable lqr_table(const std::vector<LqrRun>& runs);

struct CartPoleRun {
  std::uint64_t seed;
  LearningTrace trace;
};

/// Estimated-curvature learning on the cart-pendulum, one run per seed.
/// Records carry J_est from the fixed evaluation budget.
std::vector<CartPoleRun> run_cartpole_experiment(const ExperimentConfig& cfg);
CsvTable cartpole_table(const std::vector<CartPoleRun>& runs);

/// θ0 of the cart-pendulum run for `seed`.
ParamVector cartpole_theta0(const ExperimentConfig& cfg, std::uint64_t seed);

// Command entry points. Messages go to `out`, errors to `err`.
int cmd_verify_lqr(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_scan_hessian(const ExperimentConfig& cfg, const std::filesystem::path& csv,
                     std::ostream& out, std::ostream& err);
int cmd_learn_lqr(const ExperimentConfig& cfg, const std::filesystem::path& csv,
                  std::ostream& out, std::ostream& err);
int cmd_learn_cartpole(const ExperimentConfig& cfg, const std::filesystem::path& csv,
                       std::ostream& out, std::ostream& err);

}  // namespace qnpg
