#include "recip/reciprocity.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <ostream>

#include "csv.hpp"
#include "recip/error.hpp"

namespace recip {

namespace {

bool conjugable(const TrendTerm& t) {
  switch (t.form.kind) {
    case TrendKind::log_quadratic:
    case TrendKind::arctan:
    case TrendKind::lorentzian:
    case TrendKind::dispersive: return true;
    default: return false;
  }
}

// stored array plus the trend terms that take part in the relation
std::vector<double> direct_values(const PolarDecomposition& p, bool phase) {
  std::vector<double> out = phase ? p.phase : p.log_modulus;
  const auto& terms = phase ? p.trend.phase : p.trend.log_modulus;
  for (const auto& term : terms) {
    if (!conjugable(term)) continue;
    // the constant of a log_quadratic term is dropped like every other constant
    TrendTerm t = term;
    if (t.form.kind == TrendKind::log_quadratic) t.coefficients[0] = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += t.evaluate(p.grid.time(k));
  }
  return out;
}

PolarDecomposition prepare(const PolarDecomposition& in, int sign, const VerifyOptions& o) {
  PolarDecomposition p = in;
  if (!p.zero_events.empty()) p = rebranch(p, sign > 0 ? BranchRule::below : BranchRule::above);
  if (o.fit) p = subtract_trend(p, *o.fit, o.fit_options);
  if (p.grid.is_cyclic() && p.period_increment && *p.period_increment != 0.0)
    p = remove_secular_phase(p);
  return p;
}

std::vector<bool> inclusion_mask(const PolarDecomposition& p, const VerifyOptions& o,
                                 std::size_t& outside, double half_width) {
  const auto& g = p.grid;
  const std::size_t n = g.n;
  const double delta = o.exclusion.value_or(10 * g.dt);
  std::vector<double> centres;
  for (const auto& ev : p.zero_events) centres.push_back(ev.t0);
  for (std::size_t k = 0; k < n; ++k)
    if (p.zero_flags[k]) centres.push_back(g.time(k));
  std::vector<bool> mask(n, true);
  outside = 0;
  const double mid = g.t_start + 0.5 * g.dt * static_cast<double>(n - 1);
  const double window = o.window.value_or(half_width / 4);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = g.time(k);
    if (!g.is_cyclic() && std::abs(t - mid) > window) {
      mask[k] = false;
      ++outside;
      continue;
    }
    for (double c : centres) {
      double d = t - c;
      if (g.is_cyclic()) d = std::remainder(d, *g.period);
      if (std::abs(d) <= delta) {
        mask[k] = false;
        break;
      }
    }
  }
  return mask;
}

ReciprocityReport measure(const TimeGrid& g, Direction dir, int sign, const std::string& method,
                          std::vector<double> direct, std::vector<double> recon,
                          const std::vector<bool>& mask, std::size_t outside) {
  ReciprocityReport r;
  r.direction = dir;
  r.sign = sign;
  r.method = method;
  r.t = g.times();
  const std::size_t n = g.n;
  double mr = 0.0, md = 0.0;
  std::size_t cnt = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (mask[k]) {
      mr += recon[k] - direct[k];
      md += direct[k];
      ++cnt;
    }
  require(cnt > 0, ErrorKind::invalid_argument, "no samples left after exclusions");
  mr /= static_cast<double>(cnt);
  md /= static_cast<double>(cnt);
  // the relations fix the curves only up to a constant
  for (auto& v : recon) v -= mr;
  r.residual.resize(n);
  double s2 = 0.0, d2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    r.residual[k] = recon[k] - direct[k];
    if (mask[k]) {
      s2 += r.residual[k] * r.residual[k];
      d2 += (direct[k] - md) * (direct[k] - md);
      r.residual_max = std::max(r.residual_max, std::abs(r.residual[k]));
    }
  }
  r.included = cnt;
  r.outside_window = outside;
  r.excluded = n - cnt - outside;
  for (std::size_t k = 0; k < n; ++k)
    if (!mask[k]) r.excluded_residual_max = std::max(r.excluded_residual_max, std::abs(r.residual[k]));
  r.residual_l2 = std::sqrt(s2 / static_cast<double>(cnt));
  r.normalized_l2 = d2 > 0 ? std::sqrt(s2 / d2) : (s2 > 0 ? INFINITY : 0.0);
  r.included_mask = mask;
  r.direct = std::move(direct);
  r.reconstructed = std::move(recon);
  return r;
}

double half_width_of(const TimeGrid& g, const TransformOptions& t) {
  return t.half_width > 0 ? t.half_width : 0.5 * g.dt * static_cast<double>(g.n - 1);
}

std::vector<ReciprocityReport> run_sign(const PolarDecomposition& input, int sign,
                                        const VerifyOptions& o) {
  const PolarDecomposition p = prepare(input, sign, o);
  TransformOptions topt = o.transform;
  topt.sign = sign;
  const std::string method = p.grid.is_cyclic() ? "periodic" : to_string(topt.method);
  std::size_t outside = 0;
  const auto mask = inclusion_mask(p, o, outside, half_width_of(p.grid, topt));
  std::vector<std::string> terms;
  for (auto& t : p.trend.log_modulus) terms.push_back("log_modulus:" + t.describe());
  for (auto& t : p.trend.phase) terms.push_back("phase:" + t.describe());

  std::vector<ReciprocityReport> out;
  for (Direction dir : {Direction::modulus_to_phase, Direction::phase_to_modulus}) {
    const bool to_phase = dir == Direction::modulus_to_phase;
    auto cr = conjugate_with_tails(p, dir, topt, o.tails);
    auto r = measure(p.grid, dir, sign, method, direct_values(p, to_phase), std::move(cr.values),
                     mask, outside);
    r.trend_terms = terms;
    r.tail_estimate = cr.tail_estimate;
    out.push_back(std::move(r));
  }
  return out;
}

double score(const std::vector<ReciprocityReport>& rs) {
  double s = 0.0;
  for (auto& r : rs) s += r.normalized_l2;
  return s;
}

}  // namespace

std::vector<ReciprocityReport> verify(const PolarDecomposition& polar, const VerifyOptions& options) {
  options.transform.validate();
  if (!options.auto_sign) {
    auto rs = run_sign(polar, options.transform.sign, options);
    for (auto& r : rs) r.sign_margin = std::numeric_limits<double>::quiet_NaN();
    return rs;
  }
  std::vector<ReciprocityReport> cand[2];
  double sc[2];
  std::optional<Error> first_error;
  for (int i = 0; i < 2; ++i) {
    const int sign = i == 0 ? +1 : -1;
    try {
      cand[i] = run_sign(polar, sign, options);
      sc[i] = score(cand[i]);
    } catch (const Error& e) {
      if (!first_error) first_error = e;
      sc[i] = INFINITY;
    }
  }
  if (!std::isfinite(sc[0]) && !std::isfinite(sc[1])) throw *first_error;
  const int best = sc[0] <= sc[1] ? 0 : 1;
  const double other = sc[1 - best];
  const double margin = sc[best] > 0 ? other / sc[best] : (other > 0 ? INFINITY : 1.0);
  if (!(margin >= options.sign_margin))
    fail(ErrorKind::sign_ambiguous,
         "zeros likely in both half-planes (residual ratio between signs " +
             std::to_string(margin) + ")");
  for (auto& r : cand[best]) r.sign_margin = margin;
  return cand[best];
}

std::vector<ReciprocityReport> verify_split(const PolarDecomposition& plus_in,
                                            const PolarDecomposition& minus_in,
                                            const VerifyOptions& o) {
  o.transform.validate();
  const auto& g = plus_in.grid;
  const auto& h = minus_in.grid;
  require(g.n == h.n && g.t_start == h.t_start && g.dt == h.dt &&
              g.is_cyclic() == h.is_cyclic(),
          ErrorKind::invalid_argument, "split parts must share one grid");
  const PolarDecomposition plus = prepare(plus_in, -1, o);
  const PolarDecomposition minus = prepare(minus_in, +1, o);
  TransformOptions tp = o.transform, tm = o.transform;
  tp.sign = -1;
  tm.sign = +1;
  const std::string method = g.is_cyclic() ? "periodic" : to_string(o.transform.method);

  // exclusions from both parts
  std::size_t outside = 0;
  auto mask = inclusion_mask(plus, o, outside, half_width_of(g, o.transform));
  std::size_t outside2 = 0;
  auto mask2 = inclusion_mask(minus, o, outside2, half_width_of(g, o.transform));
  for (std::size_t k = 0; k < g.n; ++k) mask[k] = mask[k] && mask2[k];
  outside = 0;
  const double mid = g.t_start + 0.5 * g.dt * static_cast<double>(g.n - 1);
  const double window = o.window.value_or(half_width_of(g, o.transform) / 4);
  for (std::size_t k = 0; k < g.n; ++k)
    if (!g.is_cyclic() && std::abs(g.time(k) - mid) > window) ++outside;

  std::vector<std::string> terms;
  for (auto* p : {&plus, &minus})
    for (auto* arr : {&p->trend.log_modulus, &p->trend.phase})
      for (auto& t : *arr) terms.push_back((p == &plus ? "plus:" : "minus:") + t.describe());

  std::vector<ReciprocityReport> out;
  for (Direction dir : {Direction::modulus_to_phase, Direction::phase_to_modulus}) {
    const bool to_phase = dir == Direction::modulus_to_phase;
    auto a = conjugate_with_tails(minus, dir, tm, o.tails);
    auto b = conjugate_with_tails(plus, dir, tp, o.tails);
    std::vector<double> recon(g.n), direct(g.n);
    auto dp = direct_values(plus, to_phase), dm = direct_values(minus, to_phase);
    for (std::size_t k = 0; k < g.n; ++k) {
      recon[k] = a.values[k] + b.values[k];
      direct[k] = dp[k] + dm[k];
    }
    auto r = measure(g, dir, +1, method, std::move(direct), std::move(recon), mask, outside);
    r.trend_terms = terms;
    r.tail_estimate = a.tail_estimate + b.tail_estimate;
    r.sign_margin = std::numeric_limits<double>::quiet_NaN();
    out.push_back(std::move(r));
  }
  return out;
}

std::string report_json(const ReciprocityReport& r) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::json j;
  j["direction"] = to_string(r.direction);
  j["sign"] = r.sign;
  j["method"] = r.method;
  j["residual_l2"] = num(r.residual_l2);
  j["residual_max"] = num(r.residual_max);
  j["normalized_l2"] = num(r.normalized_l2);
  j["included"] = r.included;
  j["excluded"] = r.excluded;
  j["outside_window"] = r.outside_window;
  j["excluded_residual_max"] = num(r.excluded_residual_max);
  j["tail_estimate"] = num(r.tail_estimate);
  j["sign_margin"] = num(r.sign_margin);
  j["trend_terms"] = r.trend_terms;
  return j.dump(2);
}

void write_report_csv(std::ostream& out, const std::vector<ReciprocityReport>& reports) {
  using detail::num;
  require(!reports.empty(), ErrorKind::invalid_argument, "no reports to write");
  const std::size_t n = reports.front().t.size();
  out << 't';
  for (const auto& r : reports) {
    const std::string d = to_string(r.direction);
    out << ',' << d << "_direct," << d << "_reconstructed," << d << "_residual," << d << "_included";
  }
  out << '\n';
  for (std::size_t k = 0; k < n; ++k) {
    out << num(reports.front().t[k]);
    for (const auto& r : reports)
      out << ',' << num(r.direct[k]) << ',' << num(r.reconstructed[k]) << ',' << num(r.residual[k])
          << ',' << (r.included_mask[k] ? 1 : 0);
    out << '\n';
  }
}

}  // namespace recip
