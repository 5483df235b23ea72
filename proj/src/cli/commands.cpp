#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include "recip/cli.hpp"
#include "recip/cyclic.hpp"
#include "recip/error.hpp"
#include "recip/hilbert.hpp"
#include "recip/models.hpp"
#include "recip/reciprocity.hpp"
#include "recip/signal.hpp"
#include "recip/zeros.hpp"

namespace recip::cli {

namespace {

using json = nlohmann::json;
constexpr double pi = std::numbers::pi;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double to_number(const std::string& what, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || !std::isfinite(x))
    throw UsageError(what + ": '" + v + "' is not a number");
  return x;
}

std::size_t to_count(const std::string& what, const std::string& v) {
  const double x = to_number(what, v);
  if (x < 2 || x != std::floor(x) || x > 1e8) throw UsageError(what + " must be an integer >= 2");
  return static_cast<std::size_t>(x);
}

// "n,period" is cyclic from t = 0; "t0,dt,n" is a line grid
TimeGrid parse_grid(const std::string& spec) {
  const auto f = split(spec, ',');
  if (f.size() == 2) {
    const double period = to_number("grid period", f[1]);
    if (!(period > 0)) throw UsageError("grid period must be positive");
    return TimeGrid::cyclic(0.0, period, to_count("grid n", f[0]));
  }
  if (f.size() == 3) {
    const double dt = to_number("grid dt", f[1]);
    if (!(dt > 0)) throw UsageError("grid dt must be positive");
    return TimeGrid::uniform(to_number("grid t0", f[0]), dt, to_count("grid n", f[2]));
  }
  throw UsageError("grid must be n,period or t0,dt,n (got '" + spec + "')");
}

std::vector<BasisForm> parse_forms(const std::string& spec) {
  std::vector<BasisForm> out;
  if (spec == "none" || spec.empty()) return out;
  for (const auto& item : split(spec, ',')) {
    const auto f = split(item, ':');
    BasisForm b;
    try {
      b.kind = trend_kind_from_string(f[0]);
    } catch (const Error&) {
      throw UsageError("unknown trend form '" + f[0] + "'");
    }
    if (f.size() > 2) throw UsageError("trend form '" + item + "' has too many fields");
    if (f.size() == 2) {
      if (b.kind == TrendKind::polynomial)
        b.degree = static_cast<int>(to_count("polynomial degree", f[1]) );
      else
        b.scale = to_number("trend scale", f[1]);
    }
    out.push_back(b);
  }
  return out;
}

TwoStateParams two_state_params(const RunConfig& c) {
  const double omega = c.number("omega");
  if (c.is_auto("G")) return TwoStateParams::from_ratio(c.number("ratio"), omega);
  TwoStateParams p{c.number("G"), omega};
  p.validate();
  return p;
}

ExpandingParams expanding_params(const RunConfig& c) {
  ExpandingParams p;
  p.c = c.number("c");
  p.omega0 = c.number("omega0");
  p.m = c.number("m");
  p.x = c.number("x");
  p.validate();
  return p;
}

// split fractions; the preset weights map to f = (1 - w)/2
std::pair<double, double> expanding_fractions(const RunConfig& c, const ExpandingParams& p) {
  if (c.number("preset") != 0) {
    const auto w = expanding_preset(p);
    return {(1 - w.w1) / 2, (1 - w.w2) / 2};
  }
  return {c.number("f1"), c.number("f2")};
}

PacketParams packet_params(const RunConfig& c) {
  PacketParams p;
  p.m = c.number("m");
  p.delta = c.number("delta");
  p.k_mom = c.number("k");
  p.x = c.number("x");
  p.validate();
  return p;
}

FrozenGaussianParams frozen_params(const RunConfig& c) {
  FrozenGaussianParams p;
  p.m = c.number("m");
  p.omega = c.number("omega");
  p.x0 = c.number("x0");
  p.x = c.number("x");
  p.validate();
  return p;
}

std::vector<cplx> synthetic_zeros(const RunConfig& c) {
  std::vector<cplx> z;
  for (const auto& item : split(c.param("zeros"), ';')) {
    const auto f = split(item, ':');
    if (f.empty() || f.size() > 2) throw UsageError("zeros must be re[:im] items separated by ';'");
    z.emplace_back(to_number("zero", f[0]), f.size() == 2 ? to_number("zero", f[1]) : 0.0);
  }
  if (z.empty()) throw UsageError("synthetic model needs at least one zero");
  return z;
}

PropagationResult propagate_two_state(const TwoStateParams& p, double eps, const TimeGrid& g,
                                      const PropagateOptions& po) {
  Eigen::VectorXcd c0(2);
  c0 << 1.0, 0.0;
  return propagate(perturbed_two_state(p, eps), c0, g, po);
}

ComplexSignal sample_model(const RunConfig& c, const TimeGrid& g) {
  const std::string& model = c.get("model");
  if (model == "two_state") {
    const auto p = two_state_params(c);
    const double eps = c.number("eps");
    if (eps == 0.0)
      return ComplexSignal::sample(g, [&](double t) { return two_state_amplitude(p, t); }, "C_g");
    // propagated, with an internal step no larger than a 20000th of the period
    PropagateOptions po;
    po.substeps = std::max(1, static_cast<int>(std::ceil(g.dt / (4 * pi / p.omega / 20000) - 1e-9)));
    auto r = propagate_two_state(p, eps, g, po);
    r.components[0].label = "C_g";
    return r.components[0];
  }
  if (model == "expanding") {
    const auto p = expanding_params(c);
    const auto [f1, f2] = expanding_fractions(c, p);
    return ComplexSignal::sample(g, [&](double t) {
      return std::exp(expanding_part(p, f1, f2, HalfPlane::upper, t) +
                      expanding_part(p, f1, f2, HalfPlane::lower, t));
    });
  }
  if (model == "packet") {
    const auto p = packet_params(c);
    return ComplexSignal::sample(g, [&](double t) { return std::exp(packet_log_amplitude(p, t)); });
  }
  if (model == "frozen_gaussian") {
    const auto p = frozen_params(c);
    return ComplexSignal::sample(g, [&](double t) { return std::exp(frozen_gaussian_log(p, t)); });
  }
  const auto zs = synthetic_zeros(c);
  const double w = c.number("omega");
  return ComplexSignal::sample(g, [&](double t) {
    const cplx z = std::exp(cplx(0.0, w * t));
    cplx v = 1.0;
    for (const auto& zk : zs) v *= z - zk;
    return v;
  });
}

// primary stream plus a side channel: <out><suffix> for files, stderr for stdout
class Outputs {
public:
  Outputs(const std::string& path, std::ostream& out, std::ostream& err)
      : path_(path), out_(out), err_(err) {
    if (path_ != "-") {
      file_ = std::make_unique<std::ofstream>(path_, std::ios::binary);
      if (!*file_) throw UsageError("cannot write " + path_);
    }
  }
  std::ostream& primary() { return file_ ? *file_ : out_; }
  void side(const std::string& suffix, const std::string& text) {
    if (!file_) {
      err_ << text;
      return;
    }
    std::ofstream f(path_ + suffix, std::ios::binary);
    if (!f) throw UsageError("cannot write " + path_ + suffix);
    f << text;
  }

private:
  std::string path_;
  std::ostream& out_;
  std::ostream& err_;
  std::unique_ptr<std::ofstream> file_;
};

json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

// ---------------------------------------------------------------------------

int cmd_model_sample(const RunConfig& c, Outputs& o) {
  const auto s = sample_model(c, parse_grid(c.get("grid")));
  if (c.get("format") == "csv") {
    write_signal_csv(o.primary(), s);
    return ExitCode::ok;
  }
  json j;
  j["t"] = s.grid.times();
  std::vector<double> re, im;
  for (auto v : s.values) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  j["re"] = re;
  j["im"] = im;
  o.primary() << j.dump(2) << '\n';
  return ExitCode::ok;
}

struct FitStage {
  TrigPolynomial poly;
  FitReport report;
  ZeroSet zeros;
};

FitStage fit_and_solve(const RunConfig& c, const ComplexSignal& s) {
  if (!s.grid.is_cyclic()) throw UsageError("this command needs a cyclic grid (n,period)");
  if (c.get("model") == "two_state") {
    const auto p = two_state_params(c);
    if (!p.cyclic())
      fail(ErrorKind::not_cyclic, "K/omega = " + std::to_string(p.K() / p.omega) +
                                      " is not an integer, the amplitude is not periodic");
  }
  if (c.get("model") == "packet" || c.get("model") == "expanding")
    fail(ErrorKind::not_cyclic, "model " + c.get("model") + " is not periodic");
  const int N = c.is_auto("fit_n") ? static_cast<int>(std::min<std::size_t>(128, (s.grid.n - 4) / 4))
                                   : c.integer("fit_n");
  FitOptions fo;
  fo.truncate_rel = c.number("truncate_rel");
  fo.alias_tol = c.number("alias_tol");
  FitStage st;
  st.poly = fit_trig_polynomial(s, N, fo, &st.report);
  RootOptions ro;
  ro.axis_tol = c.number("axis_tol");
  st.zeros = find_zeros(st.poly, ro);
  return st;
}

int cmd_zeros(const RunConfig& c, Outputs& o) {
  const auto s = sample_model(c, parse_grid(c.get("grid")));
  const auto st = fit_and_solve(c, s);
  // a 2 pi / omega window of the model time axis
  std::optional<double> window;
  if (c.param("window") == "principal" && c.get("model") == "two_state")
    window = 2 * pi / c.number("omega");
  const auto& zs = st.zeros;
  double max_res = 0.0;
  int lower = 0, upper = 0, axis = 0;
  for (const auto& z : zs.entries) {
    max_res = std::max(max_res, z.residual);
    if (window && !in_zero_window(z, *window, zs.tol)) continue;
    (z.cls == ZeroClass::lower ? lower : z.cls == ZeroClass::upper ? upper : axis) += z.multiplicity;
  }
  json summary = {{"rows", zero_table_rows(zs, window)},
                  {"upper", upper},
                  {"lower", lower},
                  {"axis", axis},
                  {"degree", st.poly.degree()},
                  {"lowest_power", st.poly.lowest_power},
                  {"omega", st.poly.omega},
                  {"window", window ? number(*window) : json("full")},
                  {"reconstruction_error", st.report.reconstruction_error},
                  {"alias_fraction", st.report.alias_fraction},
                  {"max_residual", max_res}};
  if (c.get("format") == "csv") {
    write_zero_table_csv(o.primary(), zs, window);
    o.side(".summary.json", summary.dump(2) + "\n");
    return ExitCode::ok;
  }
  json rows = json::array();
  for (const auto& z : zs.entries) {
    if (window && !in_zero_window(z, *window, zs.tol)) continue;
    rows.push_back({{"re_t", z.t.real()},
                    {"im_t", z.t.imag()},
                    {"re_z", z.z.real()},
                    {"im_z", z.z.imag()},
                    {"multiplicity", z.multiplicity},
                    {"class", to_string(z.cls)},
                    {"residual", z.residual}});
  }
  o.primary() << json{{"summary", summary}, {"zeros", rows}}.dump(2) << '\n';
  return ExitCode::ok;
}

json pair_json(const FourierPair& p) {
  return {{"provenance", to_string(p.provenance)}, {"A", p.A},
          {"B", p.B},
          {"imag_residue", number(p.imag_residue)},
          {"secular_winding", number(p.secular_winding)}};
}

int cmd_fourier(const RunConfig& c, Outputs& o) {
  const auto s = sample_model(c, parse_grid(c.get("grid")));
  const auto st = fit_and_solve(c, s);
  const int n_max = c.integer("n_max");
  if (n_max < 1) throw UsageError("n_max must be positive");
  const auto fz = coefficients_from_zeros(st.zeros, n_max);
  SampleFourierOptions so;
  so.axis_group = c.param("axis_group") == "inner" ? AxisGroup::inner : AxisGroup::outer;
  so.include_sawtooth = c.number("sawtooth") != 0;
  so.exclude_flagged = c.number("exclude_flagged") != 0;
  so.lowest_power = st.poly.lowest_power;
  const auto fs = coefficients_from_samples(to_polar(s), n_max, so);
  const auto cmp = compare(fz, fs, &st.zeros);
  json jc = {{"max_dA", cmp.max_dA},
             {"max_dB", cmp.max_dB},
             {"l2_dA", cmp.l2_dA},
             {"l2_dB", cmp.l2_dB},
             {"weighted_l2", cmp.weighted_l2},
             {"axis_weighted", cmp.axis_weighted},
             {"near_minus_one_sum", cmp.near_minus_one_sum},
             {"ab_difference_from_zeros", ab_difference(fz)}};
  if (c.get("format") == "csv") {
    write_fourier_csv(o.primary(), {&fz, &fs});
    o.side(".compare.json", jc.dump(2) + "\n");
    return ExitCode::ok;
  }
  o.primary() << json{{"pairs", {pair_json(fz), pair_json(fs)}}, {"comparison", jc}}.dump(2)
              << '\n';
  return ExitCode::ok;
}

int cmd_verify(const RunConfig& c, Outputs& o) {
  const TimeGrid g = parse_grid(c.get("grid"));
  const std::string& model = c.get("model");
  VerifyOptions vo;
  vo.transform.method = hilbert_method_from_string(c.get("method"));
  if (!c.is_auto("half_width")) vo.transform.half_width = c.number("half_width");
  const std::string& sign = c.get("sign");
  vo.auto_sign = sign == "auto";
  vo.transform.sign = sign == "-" ? -1 : +1;
  if (!c.is_auto("exclusion")) vo.exclusion = c.number("exclusion");
  const bool line_model = model == "packet" || model == "expanding";
  if (!c.is_auto("window"))
    vo.window = c.number("window");
  else if (line_model && !g.is_cyclic())
    vo.window = 20.0;
  vo.sign_margin = c.number("margin");
  vo.tails.edge_threshold = c.number("edge_threshold");

  // analytic asymptotics of the line models
  std::string fit_log = c.param("fit_log"), fit_phase = c.param("fit_phase");
  double scale = 0.0;
  if (model == "packet") {
    const auto p = packet_params(c);
    scale = std::pow(2 * p.m * p.delta * p.delta, 2);
  } else if (model == "expanding") {
    scale = c.number("c");
  }
  char buf[64];
  if (fit_log == "auto") {
    std::snprintf(buf, sizeof buf, "log_quadratic:%.17g", scale);
    fit_log = line_model ? buf : "none";
  }
  if (fit_phase == "auto") {
    std::snprintf(buf, sizeof buf, "arctan:%.17g", scale);
    fit_phase = line_model ? buf : "none";
  }
  TrendRequest tr{parse_forms(fit_log), parse_forms(fit_phase)};
  if (!tr.log_modulus.empty() || !tr.phase.empty()) vo.fit = tr;
  if (!c.is_auto("fit_outside"))
    vo.fit_options.fit_outside = c.number("fit_outside");
  else if (vo.fit && !g.is_cyclic())
    vo.fit_options.fit_outside = 0.25 * g.dt * static_cast<double>(g.n - 1);

  std::vector<ReciprocityReport> reports;
  if (model == "expanding") {
    const auto p = expanding_params(c);
    const auto [f1, f2] = expanding_fractions(c, p);
    auto part = [&](HalfPlane h) {
      return ComplexSignal::sample(g, [&](double t) { return std::exp(expanding_part(p, f1, f2, h, t)); });
    };
    reports = verify_split(to_polar(part(HalfPlane::upper)), to_polar(part(HalfPlane::lower)), vo);
  } else {
    reports = verify(to_polar(sample_model(c, g)), vo);
  }

  json jr = json::array();
  for (const auto& r : reports) jr.push_back(json::parse(report_json(r)));
  json doc = {{"model", model}, {"sign", reports.front().sign}, {"reports", jr}};
  if (c.get("format") == "csv") {
    write_report_csv(o.primary(), reports);
    o.side(".report.json", doc.dump(2) + "\n");
    return ExitCode::ok;
  }
  o.primary() << doc.dump(2) << '\n';
  return ExitCode::ok;
}

int cmd_propagate(const RunConfig& c, Outputs& o) {
  const TimeGrid g = parse_grid(c.get("grid"));
  const auto p = two_state_params(c);
  const double eps = c.number("eps");
  PropagateOptions po;
  po.t_initial = c.number("t_initial");
  po.substeps = c.integer("substeps");
  po.max_norm_drift = c.number("max_norm_drift");
  const auto r = propagate_two_state(p, eps, g, po);

  json summary = {{"adiabaticity", r.adiabaticity},
                  {"max_norm_drift", r.max_norm_drift},
                  {"max_hermiticity_error", r.max_hermiticity_error},
                  {"under_resolved", r.under_resolved},
                  {"eps", eps}};
  // the closed form holds for the unperturbed model with C(t_initial) = (1, 0) at t = 0
  if (c.number("check") != 0 && eps == 0.0 && po.t_initial == 0.0) {
    double sup = 0.0;
    for (std::size_t k = 0; k < g.n; ++k)
      sup = std::max(sup, std::abs(r.components[0].values[k] - two_state_amplitude(p, g.time(k))));
    summary["closed_form_sup"] = sup;
  }
  if (c.get("format") == "csv") {
    auto& out = o.primary();
    char buf[32];
    auto num = [&](double v) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    out << "t,re0,im0,re1,im1\n";
    for (std::size_t k = 0; k < g.n; ++k) {
      out << num(g.time(k));
      for (const auto& comp : r.components)
        out << ',' << num(comp.values[k].real()) << ',' << num(comp.values[k].imag());
      out << '\n';
    }
    o.side(".summary.json", summary.dump(2) + "\n");
    return ExitCode::ok;
  }
  json comps = json::array();
  for (const auto& comp : r.components) {
    std::vector<double> re, im;
    for (auto v : comp.values) {
      re.push_back(v.real());
      im.push_back(v.imag());
    }
    comps.push_back({{"re", re}, {"im", im}});
  }
  o.primary() << json{{"summary", summary}, {"t", g.times()}, {"components", comps}}.dump(2) << '\n';
  return ExitCode::ok;
}

}  // namespace

int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    Outputs o(c.get("out"), out, err);
    if (c.command == "model-sample") return cmd_model_sample(c, o);
    if (c.command == "zeros") return cmd_zeros(c, o);
    if (c.command == "fourier") return cmd_fourier(c, o);
    if (c.command == "verify") return cmd_verify(c, o);
    if (c.command == "propagate") return cmd_propagate(c, o);
    throw UsageError("unknown command '" + c.command + "'");
  } catch (const UsageError& e) {
    err << "recip: " << e.what() << '\n';
    return ExitCode::usage;
  } catch (const Error& e) {
    err << "recip: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::sign_ambiguous: return ExitCode::sign_ambiguous;
      case ErrorKind::invalid_argument:
      case ErrorKind::not_cyclic:
      case ErrorKind::io: return ExitCode::usage;
      default: return ExitCode::numerical;
    }
  }
}

}  // namespace recip::cli
