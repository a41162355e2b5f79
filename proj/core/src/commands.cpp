#include "qnpg/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>

#include "qnpg/errors.hpp"
#include "qnpg/lqr_oracle.hpp"
#include "qnpg/tolerances.hpp"

#ifndef QNPG_VERSION
#define QNPG_VERSION "0.0.0"
#endif

namespace qnpg {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) { return format_number(v); }

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_outputs(const std::string& command, const ExperimentConfig& cfg, const CsvTable& table,
                   const std::filesystem::path& csv, Clock::time_point start) {
  table.write(csv);
  const auto manifest = make_manifest(command, cfg, {csv}, seconds_since(start));
  std::ofstream out(manifest_path(csv), std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + manifest_path(csv).string());
  out << manifest.dump(2) << '\n';
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const UnstableParameter& e) {
    err << "config error: " << e.what() << " (theta = " << e.theta() << ")\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

ParamVector lqr_theta0(const ExperimentConfig& cfg) {
  if (cfg.theta0.empty()) return ParamVector{1.5};
  if (cfg.theta0.size() != 1) {
    throw ConfigError("config key 'theta0': scalar LQR takes exactly one parameter");
  }
  return ParamVector{cfg.theta0[0]};
}

}  // namespace

std::string artifact_version() { return QNPG_VERSION; }

std::filesystem::path manifest_path(const std::filesystem::path& csv_path) {
  return std::filesystem::path(csv_path.string() + ".manifest.json");
}

nlohmann::json make_manifest(const std::string& command, const ExperimentConfig& cfg,
                             const std::vector<std::filesystem::path>& outputs,
                             double wall_seconds) {
  nlohmann::json j;
  j["artifact"] = kArtifactName;
  j["version"] = artifact_version();
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["config"] = to_json(cfg);
  nlohmann::json files = nlohmann::json::array();
  for (const auto& p : outputs) {
    nlohmann::json f;
    f["path"] = p.string();
    std::error_code ec;
    const auto size = std::filesystem::file_size(p, ec);
    if (!ec) f["bytes"] = size;
    files.push_back(f);
  }
  j["outputs"] = files;
  j["wall_seconds"] = wall_seconds;
  return j;
}

void print_report(const lqr::VerificationReport& report, std::ostream& out) {
  out << std::left << std::setw(30) << "check" << std::setw(8) << "status" << std::setw(24)
      << "value" << "threshold\n";
  for (const auto& c : report.checks) {
    const char* status = c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL");
    out << std::left << std::setw(30) << c.name << std::setw(8) << status << std::setw(24)
        << (c.skipped ? std::string("-") : fmt(c.value)) << fmt(c.threshold);
    if (!c.detail.empty()) out << "  " << c.detail;
    out << '\n';
  }
}

CsvTable scan_hessian_table(const ExperimentConfig& cfg) {
  const LqrConfig lqr_cfg = cfg.lqr();
  lqr_cfg.validate();
  const auto grid = lqr::theta_grid(cfg.theta_min, cfg.theta_max, cfg.points);
  for (const double t : grid) {
    if (!lqr::is_stable(t, lqr_cfg)) {
      throw UnstableParameter("scan range leaves the stability domain", t,
                              lqr::stability_denominator(t, lqr_cfg));
    }
  }
  CsvTable table({"theta", "J", "dJ", "d2J_exact", "H", "lambda", "gamma_lambda", "fisher"});
  for (const double t : grid) {
    const lqr::Curvature c = lqr::curvature(t, lqr_cfg);
    table.add_row({fmt(t), fmt(c.J), fmt(c.dJ), fmt(c.d2J_exact), fmt(c.H), fmt(c.lambda),
                   fmt(lqr_cfg.gamma * c.lambda), fmt(c.fisher)});
  }
  return table;
}

std::vector<LqrRun> run_lqr_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const LqrConfig lqr_cfg = cfg.lqr();
  const ParamVector theta0 = lqr_theta0(cfg);
  const CurvatureKind kind = parse_curvature(cfg.curvature);

  LearningHooks hooks;
  hooks.performance = [lqr_cfg](const ParamVector& th) { return lqr::performance(th[0], lqr_cfg); };
  hooks.theta_star = ParamVector{lqr::theta_star(lqr_cfg)};

  const LqrEnv env(lqr_cfg);
  const LinearPolicy policy(1, 1);
  const std::vector<std::uint64_t> seeds =
      kind == CurvatureKind::oracle ? std::vector<std::uint64_t>{cfg.seed} : cfg.seed_list();

  std::vector<LqrRun> runs;
  for (const std::uint64_t seed : seeds) {
    RolloutPlan plan = cfg.plan();
    plan.seed = seed;
    const CurvatureSource source = kind == CurvatureKind::oracle
                                       ? lqr_oracle_source(lqr_cfg)
                                       : estimated_source(env, policy, plan);
    for (const Method m : cfg.methods()) {
      OptimizerConfig opt;
      opt.method = m;
      opt.alpha = cfg.alpha_for(m);
      opt.beta = cfg.beta;
      opt.lambda_floor = cfg.lambda_floor;
      opt.max_iters = cfg.iters;
      opt.theta0 = theta0;
      opt.curvature = kind;
      if (kind == CurvatureKind::oracle) opt.grad_tolerance = tol::kOracleGradientStop;
      runs.push_back({m, seed, run_learning(source, opt, hooks)});
    }
  }
  return runs;
}

CsvTable lqr_table(const std::vector<LqrRun>& runs) {
  CsvTable table(
      {"iter", "theta", "J", "grad_norm", "err_to_opt", "ratio", "method", "seed", "diverged"});
  for (const auto& run : runs) {
    const std::string diverged = run.trace.diverged() ? "1" : "0";
    for (const auto& r : run.trace.records) {
      table.add_row({std::to_string(r.k), fmt(r.theta[0]), fmt(r.J), fmt(r.grad_norm),
                     fmt(r.error), fmt(r.ratio), to_string(run.method), std::to_string(run.seed),
                     diverged});
    }
  }
  return table;
}

ParamVector cartpole_theta0(const ExperimentConfig& cfg, std::uint64_t seed) {
  std::vector<double> base = cfg.theta0.empty() ? default_cartpole_theta0() : cfg.theta0;
  if (base.size() != 4) {
    throw ConfigError("config key 'theta0': the cart-pendulum policy takes four parameters");
  }
  if (cfg.randomize_theta0 && cfg.theta0_box > 0.0) {
    Rng rng = make_stream(seed, 0x7e7a0ULL);
    std::uniform_real_distribution<double> offset(-cfg.theta0_box, cfg.theta0_box);
    for (double& v : base) v += offset(rng);
  }
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(base.data(), 4);
  return ParamVector(v);
}

std::vector<CartPoleRun> run_cartpole_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.method == "all") {
    throw ConfigError("config key 'method': learn-cartpole takes a single method");
  }
  if (parse_curvature(cfg.curvature) != CurvatureKind::estimated) {
    throw ConfigError("config key 'curvature': the cart-pendulum has no oracle curvature");
  }
  const CartPoleEnv env(cfg.cartpole);
  const LinearPolicy policy(4, 1);
  const Method method = parse_method(cfg.method);

  LearningHooks hooks;
  hooks.performance = [&](const ParamVector& th) {
    return estimate_performance(env, policy, th, cfg.eval_rollouts, cfg.eval_horizon,
                                cfg.eval_seed)
        .mean;
  };

  std::vector<CartPoleRun> runs;
  for (const std::uint64_t seed : cfg.seed_list()) {
    RolloutPlan plan = cfg.plan();
    plan.seed = seed;
    OptimizerConfig opt;
    opt.method = method;
    opt.alpha = cfg.alpha_for(method);
    opt.beta = cfg.beta;
    opt.lambda_floor = cfg.lambda_floor;
    opt.max_iters = cfg.iters;
    opt.theta0 = cartpole_theta0(cfg, seed);
    opt.curvature = CurvatureKind::estimated;
    runs.push_back({seed, run_learning(estimated_source(env, policy, plan), opt, hooks)});
  }
  return runs;
}

CsvTable cartpole_table(const std::vector<CartPoleRun>& runs) {
  CsvTable table({"iter", "theta_1", "theta_2", "theta_3", "theta_4", "J_est", "grad_norm",
                  "method", "seed", "diverged"});
  for (const auto& run : runs) {
    const std::string diverged = run.trace.diverged() ? "1" : "0";
    for (const auto& r : run.trace.records) {
      table.add_row({std::to_string(r.k), fmt(r.theta[0]), fmt(r.theta[1]), fmt(r.theta[2]),
                     fmt(r.theta[3]), fmt(r.J), fmt(r.grad_norm), to_string(run.trace.method),
                     std::to_string(run.seed), diverged});
    }
  }
  return table;
}

int cmd_verify_lqr(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const LqrConfig lqr_cfg = cfg.lqr();
    lqr_cfg.validate();
    out << "verify-lqr gamma=" << fmt(lqr_cfg.gamma) << " sigma0_sq=" << fmt(lqr_cfg.sigma0_sq)
        << " sigma_sq=" << fmt(lqr_cfg.sigma_sq) << '\n';
    const auto report = lqr::verify_lqr(lqr_cfg);
    print_report(report, out);
    if (report.all_passed()) {
      out << "all checks passed\n";
      return kExitOk;
    }
    for (const auto& name : report.failed()) err << "FAILED: " << name << '\n';
    return kExitCheckFailed;
  });
}

int cmd_scan_hessian(const ExperimentConfig& cfg, const std::filesystem::path& csv,
                     std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = Clock::now();
    cfg.validate();
    const CsvTable table = scan_hessian_table(cfg);
    write_outputs("scan-hessian", cfg, table, csv, start);
    out << "wrote " << table.rows() << " rows to " << csv.string() << '\n';
    return kExitOk;
  });
}

int cmd_learn_lqr(const ExperimentConfig& cfg, const std::filesystem::path& csv,
                  std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = Clock::now();
    const auto runs = run_lqr_experiment(cfg);
    write_outputs("learn-lqr", cfg, lqr_table(runs), csv, start);
    for (const auto& run : runs) {
      const auto& last = run.trace.records.back();
      out << to_string(run.method) << " seed=" << run.seed << " iters=" << last.k
          << " theta=" << fmt(last.theta[0]) << " err=" << fmt(last.error)
          << " status=" << to_string(run.trace.status);
      if (!run.trace.message.empty()) out << " (" << run.trace.message << ")";
      out << '\n';
    }
    return kExitOk;
  });
}

int cmd_learn_cartpole(const ExperimentConfig& cfg, const std::filesystem::path& csv,
                       std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = Clock::now();
    const auto runs = run_cartpole_experiment(cfg);
    write_outputs("learn-cartpole", cfg, cartpole_table(runs), csv, start);
    for (const auto& run : runs) {
      const auto& first = run.trace.records.front();
      const auto& last = run.trace.records.back();
      out << to_string(run.trace.method) << " seed=" << run.seed << " iters=" << last.k
          << " J_est " << fmt(first.J) << " -> " << fmt(last.J)
          << " status=" << to_string(run.trace.status);
      if (!run.trace.message.empty()) out << " (" << run.trace.message << ")";
      out << '\n';
    }
    return kExitOk;
  });
}

}  // namespace qnpg
