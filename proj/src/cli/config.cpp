#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "../csv.hpp"
#include "recip/cli.hpp"

namespace recip::cli {

namespace {

using detail::num;
constexpr double pi = std::numbers::pi;

const std::vector<std::string> core_keys = {"model", "grid", "method", "sign", "out", "format"};

const std::map<std::string, KeyValues>& model_params() {
  static const std::map<std::string, KeyValues> m = {
      {"two_state", {{"omega", "1"}, {"ratio", "8"}, {"G", "auto"}, {"eps", "0"}}},
      {"expanding",
       {{"c", "1"}, {"omega0", "1"}, {"m", "1"}, {"x", "1"}, {"f1", "0.5"}, {"f2", "0.5"},
        {"preset", "0"}}},
      {"packet", {{"m", "1"}, {"delta", "1"}, {"k", "0"}, {"x", "1"}}},
      {"frozen_gaussian", {{"m", "1"}, {"omega", "1"}, {"x0", "1"}, {"x", "0"}}},
      {"synthetic", {{"zeros", "0.5"}, {"omega", "1"}}},
  };
  return m;
}

const std::map<std::string, KeyValues>& command_params() {
  static const KeyValues fit = {{"fit_n", "auto"},
                                {"truncate_rel", "1e-12"},
                                {"alias_tol", "1e-8"},
                                {"axis_tol", "1e-6"}};
  static const std::map<std::string, KeyValues> m = [] {
    std::map<std::string, KeyValues> r;
    r["model-sample"] = {};
    r["zeros"] = fit;
    r["zeros"]["window"] = "principal";
    r["fourier"] = fit;
    r["fourier"].insert({{"n_max", "16"},
                         {"axis_group", "outer"},
                         {"sawtooth", "1"},
                         {"exclude_flagged", "0"}});
    r["verify"] = {{"exclusion", "auto"},   {"window", "auto"},    {"half_width", "auto"},
                   {"fit_log", "auto"},     {"fit_phase", "auto"}, {"fit_outside", "auto"},
                   {"margin", "2"},         {"edge_threshold", "0.05"}};
    r["propagate"] = {{"t_initial", "0"}, {"substeps", "1"}, {"max_norm_drift", "1e-6"},
                      {"check", "1"}};
    return r;
  }();
  return m;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out))
    throw UsageError("parameter " + key + ": '" + v + "' is not a finite number");
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_core(const std::string& key) {
  return std::find(core_keys.begin(), core_keys.end(), key) != core_keys.end();
}

std::string normalize_key(const std::string& key) {
  if (is_core(key) || key.rfind("param.", 0) == 0) return key;
  return "param." + key;
}

// one period of the signal the model produces
std::string default_grid(const std::string& command, const std::string& model,
                         const RunConfig& c) {
  if (model == "two_state") {
    const std::size_t n = command == "propagate" ? 20000 : 4096;
    return std::to_string(n) + "," + num(4 * pi / c.number("omega"));
  }
  if (model == "synthetic" || model == "frozen_gaussian")
    return "1024," + num(2 * pi / c.number("omega"));
  const double T = model == "packet" ? 200.0 : 400.0;
  const std::size_t n = 32768;
  return num(-T) + "," + num(2 * T / static_cast<double>(n)) + "," + std::to_string(n);
}

void check_choice(const std::string& key, const std::string& v,
                  std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return;
  std::string msg = key + " must be one of:";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw UsageError(msg + " (got '" + v + "')");
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"model-sample", "zeros", "fourier", "verify",
                                             "propagate"};
  return c;
}

const std::vector<std::string>& models() {
  static const std::vector<std::string> m = [] {
    std::vector<std::string> r;
    for (auto& [k, v] : model_params()) r.push_back(k);
    return r;
  }();
  return m;
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw UsageError("missing configuration key " + key);
  return it->second;
}

const std::string& RunConfig::param(const std::string& name) const { return get("param." + name); }

double RunConfig::number(const std::string& name) const { return parse_double(name, param(name)); }

int RunConfig::integer(const std::string& name) const {
  const double v = number(name);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw UsageError("parameter " + name + " must be an integer");
  return static_cast<int>(v);
}

KeyValues read_config_file(std::istream& in) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
    kv[normalize_key(key)] = trim(line.substr(eq + 1));
  }
  return kv;
}

RunConfig resolve(const std::string& command, const KeyValues& file, const KeyValues& flags) {
  const auto& cmds = commands();
  if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
    throw UsageError("unknown command '" + command + "'");

  KeyValues given = file;
  for (auto& [k, v] : flags) given[normalize_key(k)] = v;

  RunConfig c;
  c.command = command;
  const std::string model = given.count("model") ? given.at("model") : "two_state";
  auto mp = model_params().find(model);
  if (mp == model_params().end()) throw UsageError("unknown model '" + model + "'");
  if (command == "propagate" && model != "two_state")
    throw UsageError("propagate supports the two_state model only");

  c.values = {{"model", model}, {"method", "spectral"}, {"sign", "auto"},
              {"out", "-"},     {"format", "csv"}};
  for (auto& [k, v] : mp->second) c.values["param." + k] = v;
  for (auto& [k, v] : command_params().at(command)) c.values["param." + k] = v;

  for (auto& [k, v] : given) {
    if (k == "grid") continue;
    if (!c.values.count(k)) {
      const std::string name = k.rfind("param.", 0) == 0 ? k.substr(6) : k;
      throw UsageError("unknown key '" + name + "' for model " + model + " and command " +
                       command);
    }
    c.values[k] = v;
  }
  c.values["grid"] = given.count("grid") ? given.at("grid") : default_grid(command, model, c);

  check_choice("method", c.get("method"), {"spectral", "pv_quadrature"});
  check_choice("sign", c.get("sign"), {"auto", "+", "-"});
  check_choice("format", c.get("format"), {"csv", "json"});
  if (c.values.count("param.axis_group"))
    check_choice("axis_group", c.param("axis_group"), {"outer", "inner"});
  if (c.values.count("param.window") && command == "zeros")
    check_choice("window", c.param("window"), {"principal", "full"});
  // numeric parameters fail early rather than halfway through a run
  for (auto& [k, v] : c.values) {
    if (k.rfind("param.", 0) != 0 || v == "auto") continue;
    const std::string name = k.substr(6);
    if (name == "zeros" || name == "axis_group" || name == "window" || name == "fit_log" ||
        name == "fit_phase")
      continue;
    parse_double(name, v);
  }
  return c;
}

std::string show_config(const RunConfig& config) {
  std::ostringstream s;
  s << "command = " << config.command << '\n';
  for (auto& [k, v] : config.values) s << k << " = " << v << '\n';
  return s.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sample, transform and check complex amplitudes", "recip"};
  app.require_subcommand(1, 1);
  std::string model, grid, method, sign, out_path, format, config_path;
  std::vector<std::string> params;
  bool show = false;
  for (const auto& name : commands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--model", model, "model name");
    sub->add_option("--param", params, "model or command parameter k=v")->allow_extra_args(false);
    sub->add_option("--grid", grid, "n,period (cyclic, from t=0) or t0,dt,n");
    sub->add_option("--method", method, "spectral or pv_quadrature");
    sub->add_option("--sign", sign, "auto, + or -");
    sub->add_option("--out", out_path, "output path, - for stdout");
    sub->add_option("--format", format, "csv or json");
    sub->add_option("--config", config_path, "flat key = value file");
    sub->add_flag("--show-config", show, "print the effective configuration and exit");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ExitCode::ok : ExitCode::usage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    KeyValues file;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw UsageError("cannot read config file " + config_path);
      file = read_config_file(f);
    }
    KeyValues flags;
    if (!model.empty()) flags["model"] = model;
    if (!grid.empty()) flags["grid"] = grid;
    if (!method.empty()) flags["method"] = method;
    if (!sign.empty()) flags["sign"] = sign;
    if (!out_path.empty()) flags["out"] = out_path;
    if (!format.empty()) flags["format"] = format;
    for (const auto& p : params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("--param expects k=v, got '" + p + "'");
      flags["param." + p.substr(0, eq)] = p.substr(eq + 1);
    }
    const RunConfig config = resolve(command, file, flags);
    if (show) {
      out << show_config(config);
      return ExitCode::ok;
    }
    return execute(config, out, err);
  } catch (const UsageError& e) {
    err << "recip: " << e.what() << '\n';
    return ExitCode::usage;
  }
}

}  // namespace recip::cli
