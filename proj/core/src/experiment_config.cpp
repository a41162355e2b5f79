#include "qnpg/experiment_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <type_traits>

#include "qnpg/errors.hpp"

namespace qnpg {

namespace {

using json = nlohmann::json;

template <typename T>
T get_as(const json& j, const std::string& key) {
  if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    if (!j.is_number_integer()) throw ConfigError("config key '" + key + "': expected an integer");
    if (std::is_unsigned_v<T> && !j.is_number_unsigned()) {
      throw ConfigError("config key '" + key + "': expected a non-negative integer");
    }
  }
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

using Setter = std::function<void(ExperimentConfig&, const json&, const std::string&)>;

template <typename T, typename Member>
Setter field(Member member) {
  return [member](ExperimentConfig& c, const json& v, const std::string& key) {
    std::invoke(member, c) = get_as<T>(v, key);
  };
}

template <typename T, typename Member>
Setter cp_field(Member member) {
  return [member](ExperimentConfig& c, const json& v, const std::string& key) {
    std::invoke(member, c.cartpole) = get_as<T>(v, key);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"gamma", field<double>(&ExperimentConfig::gamma)},
      {"sigma0_sq", field<double>(&ExperimentConfig::sigma0_sq)},
      {"sigma_sq", field<double>(&ExperimentConfig::sigma_sq)},
      {"theta0", field<std::vector<double>>(&ExperimentConfig::theta0)},
      {"method", field<std::string>(&ExperimentConfig::method)},
      {"alpha",
       [](ExperimentConfig& c, const json& v, const std::string& key) {
         if (v.is_null()) {
           c.alpha.reset();
         } else {
           c.alpha = get_as<double>(v, key);
         }
       }},
      {"beta", field<double>(&ExperimentConfig::beta)},
      {"lambda_floor", field<double>(&ExperimentConfig::lambda_floor)},
      {"iters", field<int>(&ExperimentConfig::iters)},
      {"curvature", field<std::string>(&ExperimentConfig::curvature)},
      {"n_outer", field<int>(&ExperimentConfig::n_outer)},
      {"horizon", field<int>(&ExperimentConfig::horizon)},
      {"n_q", field<int>(&ExperimentConfig::n_q)},
      {"fd_step", field<double>(&ExperimentConfig::fd_step)},
      {"workers", field<int>(&ExperimentConfig::workers)},
      {"theta_min", field<double>(&ExperimentConfig::theta_min)},
      {"theta_max", field<double>(&ExperimentConfig::theta_max)},
      {"points", field<int>(&ExperimentConfig::points)},
      {"seed", field<std::uint64_t>(&ExperimentConfig::seed)},
      {"seeds", field<int>(&ExperimentConfig::seeds)},
      {"cp_cart_mass", cp_field<double>(&CartPoleConfig::cart_mass)},
      {"cp_pole_mass", cp_field<double>(&CartPoleConfig::pole_mass)},
      {"cp_pole_length", cp_field<double>(&CartPoleConfig::pole_length)},
      {"cp_gravity", cp_field<double>(&CartPoleConfig::gravity)},
      {"cp_dt", cp_field<double>(&CartPoleConfig::dt)},
      {"cp_substeps", cp_field<int>(&CartPoleConfig::substeps)},
      {"cp_gamma", cp_field<double>(&CartPoleConfig::gamma)},
      {"cp_noise_var", cp_field<double>(&CartPoleConfig::noise_var)},
      {"cp_action_cost", cp_field<double>(&CartPoleConfig::action_cost)},
      {"cp_init_var", cp_field<double>(&CartPoleConfig::init_var)},
      {"eval_rollouts", field<int>(&ExperimentConfig::eval_rollouts)},
      {"eval_horizon", field<int>(&ExperimentConfig::eval_horizon)},
      {"eval_seed", field<std::uint64_t>(&ExperimentConfig::eval_seed)},
      {"randomize_theta0", field<bool>(&ExperimentConfig::randomize_theta0)},
      {"theta0_box", field<double>(&ExperimentConfig::theta0_box)},
  };
  return table;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("config key '" + key + "': " + what);
}

}  // namespace

LqrConfig ExperimentConfig::lqr() const { return LqrConfig{sigma0_sq, sigma_sq, gamma}; }

RolloutPlan ExperimentConfig::plan() const {
  RolloutPlan p;
  p.n_outer = n_outer;
  p.horizon = horizon;
  p.n_q = n_q;
  p.fd_step = fd_step;
  p.seed = seed;
  p.workers = workers;
  return p;
}

std::vector<Method> ExperimentConfig::methods() const {
  if (method == "all") return {Method::gd, Method::ngd, Method::qn};
  return {parse_method(method)};
}

double ExperimentConfig::alpha_for(Method m) const {
  if (alpha) return *alpha;
  switch (m) {
    case Method::gd:
    case Method::ngd:
      return 0.2;
    case Method::qn:
    case Method::qn_reg:
      return 1.0;
  }
  return 1.0;
}

std::vector<std::uint64_t> ExperimentConfig::seed_list() const {
  std::vector<std::uint64_t> list;
  for (int i = 0; i < seeds; ++i) list.push_back(seed + static_cast<std::uint64_t>(i));
  return list;
}

void ExperimentConfig::validate() const {
  try {
    lqr().validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("lqr: ") + e.what());
  }
  try {
    cartpole.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("cartpole: ") + e.what());
  }
  for (double t : theta0) require(std::isfinite(t), "theta0", "entries must be finite");
  if (method != "all") {
    try {
      (void)parse_method(method);
    } catch (const std::exception& e) {
      throw ConfigError("config key 'method': " + std::string(e.what()));
    }
  }
  try {
    (void)parse_curvature(curvature);
  } catch (const std::exception& e) {
    throw ConfigError("config key 'curvature': " + std::string(e.what()));
  }
  if (alpha) require(std::isfinite(*alpha) && *alpha > 0.0, "alpha", "must be positive");
  require(std::isfinite(beta) && beta >= 0.0, "beta", "must be >= 0");
  require(std::isfinite(lambda_floor) && lambda_floor > 0.0, "lambda_floor", "must be positive");
  require(iters >= 0, "iters", "must be >= 0");
  require(n_outer > 0, "n_outer", "must be positive");
  require(horizon > 0, "horizon", "must be positive");
  require(n_q > 0, "n_q", "must be positive");
  require(std::isfinite(fd_step) && fd_step > 0.0, "fd_step", "must be positive");
  require(workers >= 0, "workers", "must be >= 0");
  require(std::isfinite(theta_min) && std::isfinite(theta_max) && theta_min <= theta_max,
          "theta_min", "must satisfy theta_min <= theta_max");
  require(points >= 1, "points", "must be >= 1");
  require(seeds >= 1, "seeds", "must be >= 1");
  require(eval_rollouts > 0, "eval_rollouts", "must be positive");
  require(eval_horizon > 0, "eval_horizon", "must be positive");
  require(std::isfinite(theta0_box) && theta0_box >= 0.0, "theta0_box", "must be >= 0");
}

std::vector<double> default_cartpole_theta0() { return {0.5, 0.1, -0.5, -1.0}; }

ExperimentConfig cartpole_defaults() {
  ExperimentConfig c;
  c.theta0 = default_cartpole_theta0();
  c.method = "qn_reg";
  c.curvature = "estimated";
  c.iters = 20;
  c.n_outer = 20;
  c.horizon = 100;
  c.n_q = 10;
  c.seeds = 3;
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["gamma"] = c.gamma;
  j["sigma0_sq"] = c.sigma0_sq;
  j["sigma_sq"] = c.sigma_sq;
  j["theta0"] = c.theta0;
  j["method"] = c.method;
  j["alpha"] = c.alpha ? json(*c.alpha) : json(nullptr);
  j["beta"] = c.beta;
  j["lambda_floor"] = c.lambda_floor;
  j["iters"] = c.iters;
  j["curvature"] = c.curvature;
  j["n_outer"] = c.n_outer;
  j["horizon"] = c.horizon;
  j["n_q"] = c.n_q;
  j["fd_step"] = c.fd_step;
  j["workers"] = c.workers;
  j["theta_min"] = c.theta_min;
  j["theta_max"] = c.theta_max;
  j["points"] = c.points;
  j["seed"] = c.seed;
  j["seeds"] = c.seeds;
  j["cp_cart_mass"] = c.cartpole.cart_mass;
  j["cp_pole_mass"] = c.cartpole.pole_mass;
  j["cp_pole_length"] = c.cartpole.pole_length;
  j["cp_gravity"] = c.cartpole.gravity;
  j["cp_dt"] = c.cartpole.dt;
  j["cp_substeps"] = c.cartpole.substeps;
  j["cp_gamma"] = c.cartpole.gamma;
  j["cp_noise_var"] = c.cartpole.noise_var;
  j["cp_action_cost"] = c.cartpole.action_cost;
  j["cp_init_var"] = c.cartpole.init_var;
  j["eval_rollouts"] = c.eval_rollouts;
  j["eval_horizon"] = c.eval_horizon;
  j["eval_seed"] = c.eval_seed;
  j["randomize_theta0"] = c.randomize_theta0;
  j["theta0_box"] = c.theta0_box;
  return j;
}

ExperimentConfig apply_json(ExperimentConfig base, const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const auto& table = setters();
  for (const auto& [key, value] : j.items()) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(base, value, key);
  }
  return base;
}

json load_config_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  if (j.is_object() && j.contains("config") && j.contains("artifact")) {
    return j.at("config");
  }
  return j;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw ConfigError("empty entry in list '" + text + "'");
    const std::string trimmed = item.substr(first, last - first + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), v);
    if (ec != std::errc() || ptr != trimmed.data() + trimmed.size()) {
      throw ConfigError("not a number: '" + trimmed + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

}  // namespace qnpg
