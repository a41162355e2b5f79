// qnpg: experiment runner. Writes CSV plus <out>.manifest.json.
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "qnpg/commands.hpp"
#include "qnpg/errors.hpp"
#include "qnpg/experiment_config.hpp"

namespace {

using nlohmann::json;

std::string flag_name(const std::string& key) {
  std::string name = key;
  for (char& c : name) {
    if (c == '_') c = '-';
  }
  return "--" + name;
}

// Converts a flag value to the JSON type of the key's default.
json flag_to_json(const std::string& key, const std::string& text, const json& like) {
  if (key == "theta0") return qnpg::parse_number_list(text);
  if (like.is_string()) return text;
  if (like.is_boolean()) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw qnpg::ConfigError("flag " + flag_name(key) + ": expected true or false");
  }
  if (key == "alpha" && text == "auto") return nullptr;
  const auto values = qnpg::parse_number_list(text);
  if (values.size() != 1) throw qnpg::ConfigError("flag " + flag_name(key) + ": expected one number");
  const double v = values[0];
  if (like.is_number_integer()) {
    if (v != static_cast<double>(static_cast<long long>(v))) {
      throw qnpg::ConfigError("flag " + flag_name(key) + ": expected an integer");
    }
    if (like.is_number_unsigned()) {
      if (v < 0) throw qnpg::ConfigError("flag " + flag_name(key) + ": must be >= 0");
      return std::stoull(text);
    }
    return static_cast<long long>(v);
  }
  return v;
}

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config_path;
  std::string out_path;
  std::map<std::string, std::string> flags;
};

Subcommand add_subcommand(CLI::App& root, const std::string& name, const std::string& help) {
  Subcommand sub;
  sub.app = root.add_subcommand(name, help);
  return sub;
}

void bind_options(Subcommand& sub, const json& defaults, bool writes_csv) {
  sub.app->add_option("--config", sub.config_path, "JSON config or run manifest");
  if (writes_csv) {
    sub.app->add_option("--out", sub.out_path, "CSV output path")->required();
  }
  for (const auto& [key, value] : defaults.items()) {
    std::string help = "config key '" + key + "' (default " + value.dump() + ")";
    sub.app->add_option(flag_name(key), sub.flags[key], help);
  }
}

qnpg::ExperimentConfig resolve(const Subcommand& sub, qnpg::ExperimentConfig base) {
  if (!sub.config_path.empty()) {
    base = qnpg::apply_json(base, qnpg::load_config_json(sub.config_path));
  }
  const json defaults = qnpg::to_json(base);
  json overrides = json::object();
  for (const auto& [key, text] : sub.flags) {
    const auto* opt = sub.app->get_option_no_throw(flag_name(key));
    if (opt == nullptr || opt->count() == 0) continue;
    overrides[key] = flag_to_json(key, text, key == "alpha" ? json(0.0) : defaults.at(key));
  }
  base = qnpg::apply_json(base, overrides);
  base.validate();
  return base;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-Newton deterministic policy gradient experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qnpg::artifact_version());

  const qnpg::ExperimentConfig lqr_defaults;
  const qnpg::ExperimentConfig cp_defaults = qnpg::cartpole_defaults();

  Subcommand verify = add_subcommand(app, "verify-lqr", "closed-form consistency checks");
  Subcommand scan = add_subcommand(app, "scan-hessian", "J, gradient, Hessian terms over a grid");
  Subcommand learn = add_subcommand(app, "learn-lqr", "gd / ngd / qn on the scalar LQR");
  Subcommand cart = add_subcommand(app, "learn-cartpole", "estimated-curvature learning on the cart-pendulum");
  bind_options(verify, qnpg::to_json(lqr_defaults), false);
  bind_options(scan, qnpg::to_json(lqr_defaults), true);
  bind_options(learn, qnpg::to_json(lqr_defaults), true);
  bind_options(cart, qnpg::to_json(cp_defaults), true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qnpg::kExitConfigError;
  }

  try {
    if (verify.app->parsed()) {
      return qnpg::cmd_verify_lqr(resolve(verify, lqr_defaults), std::cout, std::cerr);
    }
    if (scan.app->parsed()) {
      return qnpg::cmd_scan_hessian(resolve(scan, lqr_defaults), scan.out_path, std::cout, std::cerr);
    }
    if (learn.app->parsed()) {
      return qnpg::cmd_learn_lqr(resolve(learn, lqr_defaults), learn.out_path, std::cout, std::cerr);
    }
    if (cart.app->parsed()) {
      return qnpg::cmd_learn_cartpole(resolve(cart, cp_defaults), cart.out_path, std::cout, std::cerr);
    }
  } catch (const qnpg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return qnpg::kExitConfigError;
  }
  return qnpg::kExitConfigError;
}
