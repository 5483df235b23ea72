#include <Eigen/Dense>
#include <cmath>
#include <cstdio>

#include "recip/error.hpp"
#include "recip/signal.hpp"

namespace recip {

const char* to_string(TrendKind kind) {
  switch (kind) {
    case TrendKind::none: return "none";
    case TrendKind::constant: return "constant";
    case TrendKind::linear: return "linear";
    case TrendKind::polynomial: return "polynomial";
    case TrendKind::log_quadratic: return "log_quadratic";
    case TrendKind::arctan: return "arctan";
    case TrendKind::lorentzian: return "lorentzian";
    case TrendKind::dispersive: return "dispersive";
  }
  return "?";
}

TrendKind trend_kind_from_string(const std::string& name) {
  for (auto k : {TrendKind::none, TrendKind::constant, TrendKind::linear, TrendKind::polynomial,
                 TrendKind::log_quadratic, TrendKind::arctan, TrendKind::lorentzian,
                 TrendKind::dispersive})
    if (name == to_string(k)) return k;
  fail(ErrorKind::invalid_argument, "unknown trend kind '" + name + "'");
}

std::size_t BasisForm::size() const {
  switch (kind) {
    case TrendKind::none: return 0;
    case TrendKind::constant: return 1;
    case TrendKind::linear: return 2;
    case TrendKind::polynomial: return static_cast<std::size_t>(std::max(degree, 0)) + 1;
    case TrendKind::log_quadratic: return 2;
    case TrendKind::arctan:
    case TrendKind::lorentzian:
    case TrendKind::dispersive: return 1;
  }
  return 0;
}

void BasisForm::values(double t, std::span<double> out) const {
  const double c = scale;
  switch (kind) {
    case TrendKind::none: break;
    case TrendKind::constant: out[0] = 1.0; break;
    case TrendKind::linear:
      out[0] = 1.0;
      out[1] = t;
      break;
    case TrendKind::polynomial: {
      double p = 1.0;
      for (std::size_t j = 0; j < size(); ++j, p *= t) out[j] = p;
      break;
    }
    case TrendKind::log_quadratic:
      out[0] = 1.0;
      out[1] = std::log(t * t + c);
      break;
    case TrendKind::arctan: out[0] = std::atan(t / std::sqrt(c)); break;
    case TrendKind::lorentzian: out[0] = 1.0 / (t * t + c); break;
    case TrendKind::dispersive: out[0] = t / (t * t + c); break;
  }
}

double TrendTerm::evaluate(double t) const {
  double buf[32];
  std::vector<double> big;
  std::span<double> v(buf, std::min<std::size_t>(form.size(), 32));
  if (form.size() > 32) {
    big.resize(form.size());
    v = big;
  }
  form.values(t, v);
  double s = 0.0;
  for (std::size_t j = 0; j < v.size() && j < coefficients.size(); ++j) s += coefficients[j] * v[j];
  return s;
}

std::string TrendTerm::describe() const {
  std::string s = to_string(form.kind);
  char buf[64];
  if (form.kind == TrendKind::log_quadratic || form.kind == TrendKind::arctan ||
      form.kind == TrendKind::lorentzian || form.kind == TrendKind::dispersive) {
    std::snprintf(buf, sizeof buf, "(c=%.17g)", form.scale);
    s += buf;
  }
  s += "[";
  for (std::size_t j = 0; j < coefficients.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%s%.17g", j ? "," : "", coefficients[j]);
    s += buf;
  }
  return s + "]";
}

double TrendRecord::log_modulus_at(double t) const {
  double s = 0.0;
  for (auto& term : log_modulus) s += term.evaluate(t);
  return s;
}

double TrendRecord::phase_at(double t) const {
  double s = 0.0;
  for (auto& term : phase) s += term.evaluate(t);
  return s;
}

namespace {

// Fits `forms` to y on unflagged samples. `fixed_slope` pins the t column of
// the first linear form.
std::vector<TrendTerm> fit_forms(const PolarDecomposition& p, const std::vector<double>& y,
                                 const std::vector<BasisForm>& forms,
                                 std::optional<double> fixed_slope, const TrendFitOptions& o) {
  const double max_condition = o.max_condition;
  std::vector<TrendTerm> terms;
  std::size_t cols = 0;
  for (auto& f : forms) {
    require(f.kind == TrendKind::none || f.size() > 0, ErrorKind::invalid_argument, "empty form");
    if ((f.kind == TrendKind::log_quadratic || f.kind == TrendKind::arctan ||
         f.kind == TrendKind::lorentzian || f.kind == TrendKind::dispersive))
      require(f.scale > 0, ErrorKind::invalid_argument, "trend scale c must be positive");
    terms.push_back({f, std::vector<double>(f.size(), 0.0)});
    cols += f.size();
  }
  if (cols == 0) return {};

  int slope_term = -1;
  if (fixed_slope) {
    for (std::size_t i = 0; i < forms.size(); ++i)
      if (forms[i].kind == TrendKind::linear) {
        slope_term = static_cast<int>(i);
        break;
      }
  }
  if (slope_term >= 0) --cols;

  std::vector<std::size_t> rows;
  const double mid = p.grid.t_start + 0.5 * p.grid.dt * static_cast<double>(p.grid.n - 1);
  for (std::size_t k = 0; k < p.grid.n; ++k) {
    if (p.zero_flags[k]) continue;
    if (o.fit_outside && !p.grid.is_cyclic() && std::abs(p.grid.time(k) - mid) < *o.fit_outside) continue;
    rows.push_back(k);
  }
  require(rows.size() >= cols, ErrorKind::rank_deficient,
          "fewer usable samples than trend parameters");

  Eigen::MatrixXd A(rows.size(), cols);
  Eigen::VectorXd b(rows.size());
  std::vector<double> v;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double t = p.grid.time(rows[r]);
    double target = y[rows[r]];
    std::size_t c = 0;
    for (std::size_t i = 0; i < forms.size(); ++i) {
      v.resize(forms[i].size());
      forms[i].values(t, v);
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (static_cast<int>(i) == slope_term && j == 1) {
          target -= *fixed_slope * v[j];
          continue;
        }
        A(r, c++) = v[j];
      }
    }
    b(r) = target;
  }
  if (cols > 0) {
    Eigen::VectorXd scale = A.colwise().norm().transpose();
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
      require(scale(c) > 0, ErrorKind::rank_deficient, "trend column vanishes on the grid");
      A.col(c) /= scale(c);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    if (!(cond <= max_condition)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "condition number %.3g exceeds %.3g", cond, max_condition);
      fail(ErrorKind::rank_deficient, buf);
    }
    Eigen::VectorXd x = svd.solve(b);
    for (Eigen::Index c = 0; c < x.size(); ++c) x(c) /= scale(c);
    std::size_t c = 0;
    for (std::size_t i = 0; i < forms.size(); ++i)
      for (std::size_t j = 0; j < forms[i].size(); ++j) {
        if (static_cast<int>(i) == slope_term && j == 1) continue;
        terms[i].coefficients[j] = x(static_cast<Eigen::Index>(c++));
      }
  }
  if (slope_term >= 0) terms[static_cast<std::size_t>(slope_term)].coefficients[1] = *fixed_slope;
  return terms;
}

void apply(PolarDecomposition& p, const std::vector<TrendTerm>& terms, bool phase, double sign) {
  auto& arr = phase ? p.phase : p.log_modulus;
  auto& rec = phase ? p.trend.phase : p.trend.log_modulus;
  for (auto& term : terms) {
    for (std::size_t k = 0; k < arr.size(); ++k) arr[k] -= sign * term.evaluate(p.grid.time(k));
    if (phase && p.period_increment) {
      const double t0 = p.grid.t_start;
      *p.period_increment -= sign * (term.evaluate(t0 + *p.grid.period) - term.evaluate(t0));
    }
    if (sign > 0) rec.push_back(term);
  }
}

}  // namespace

PolarDecomposition subtract_trend(const PolarDecomposition& polar, const TrendRequest& request,
                                  const TrendFitOptions& options) {
  PolarDecomposition p = polar;
  std::optional<double> slope;
  if (p.grid.is_cyclic() && p.period_increment) slope = *p.period_increment / *p.grid.period;
  auto lt = fit_forms(p, p.log_modulus, request.log_modulus, std::nullopt, options);
  auto pt = fit_forms(p, p.phase, request.phase, slope, options);
  apply(p, lt, false, 1.0);
  apply(p, pt, true, 1.0);
  return p;
}

PolarDecomposition restore_trend(const PolarDecomposition& polar) {
  PolarDecomposition p = polar;
  auto lt = p.trend.log_modulus;
  auto pt = p.trend.phase;
  p.trend = {};
  apply(p, lt, false, -1.0);
  apply(p, pt, true, -1.0);
  return p;
}

PolarDecomposition remove_secular_phase(const PolarDecomposition& polar) {
  require(polar.grid.is_cyclic() && polar.period_increment.has_value(), ErrorKind::not_cyclic,
          "secular phase removal needs a cyclic grid");
  TrendRequest req;
  req.phase.push_back({TrendKind::linear, 1.0, 1});
  return subtract_trend(polar, req);
}

}  // namespace recip
