#include <cmath>
#include <numbers>

#include "recip/error.hpp"
#include "recip/hilbert.hpp"

namespace recip {

namespace {
constexpr double pi = std::numbers::pi;
}

const std::vector<ConjugatePair>& conjugate_dictionary() {
  static const std::vector<ConjugatePair> pairs = {
      {"lorentzian", [](double t, double c) { return 1.0 / (t * t + c); },
       [](double t, double c) { return -t / (std::sqrt(c) * (t * t + c)); },
       "decays as 1/t^2; c > 0", false, 1e-6},
      {"dispersive", [](double t, double c) { return t / (t * t + c); },
       [](double t, double c) { return std::sqrt(c) / (t * t + c); },
       "decays as 1/t; truncation error ~1/T", false, 1e-3},
      {"log_quadratic", [](double t, double c) { return std::log(t * t + c); },
       [](double t, double c) { return 2.0 * std::atan(t / std::sqrt(c)); },
       "grows logarithmically; symmetric principal value, modulo a constant", false, 1e-2},
      {"arctan", [](double t, double c) { return std::atan(t / std::sqrt(c)); },
       [](double t, double c) { return -0.5 * std::log(t * t + c); },
       "bounded, not decaying; modulo a constant", false, 1e-2},
      {"log_ratio",
       [](double t, double c) { return 0.5 * std::log((t * t + c) / (t * t + 4 * c)); },
       [](double t, double c) {
         return std::atan(t / std::sqrt(c)) - std::atan(t / (2 * std::sqrt(c)));
       },
       "decays as 1/t^2", false, 1e-5},
      {"log_sine", [](double psi, double) { return std::log(std::abs(2 * std::sin(psi / 2))); },
       [](double psi, double) { return (pi - psi) / 2; },
       "periodic, psi in (0, 2 pi); converges in the mean at psi = 0", true, 1e-3},
      {"sawtooth", [](double th, double) { return th; },
       [](double th, double) { return 2 * std::log(std::abs(2 * std::cos(th / 2))); },
       "periodic, theta in (-pi, pi); converges in the mean at theta = pi", true, 1e-3},
  };
  return pairs;
}

const ConjugatePair& conjugate_pair(const std::string& name) {
  for (const auto& p : conjugate_dictionary())
    if (p.name == name) return p;
  fail(ErrorKind::invalid_argument, "no conjugate pair named '" + name + "'");
}

std::optional<TrendTerm> conjugate_term(const TrendTerm& term) {
  const double c = term.form.scale;
  const auto& a = term.coefficients;
  auto coef = [&](std::size_t i) { return i < a.size() ? a[i] : 0.0; };
  switch (term.form.kind) {
    case TrendKind::none:
    case TrendKind::constant: return TrendTerm{{TrendKind::constant, 1.0, 0}, {0.0}};
    case TrendKind::linear:
    case TrendKind::polynomial: return std::nullopt;
    case TrendKind::log_quadratic:
      return TrendTerm{{TrendKind::arctan, c, 1}, {2.0 * coef(1)}};
    case TrendKind::arctan:
      return TrendTerm{{TrendKind::log_quadratic, c, 1}, {0.0, -0.5 * coef(0)}};
    case TrendKind::lorentzian:
      return TrendTerm{{TrendKind::dispersive, c, 1}, {-coef(0) / std::sqrt(c)}};
    case TrendKind::dispersive:
      return TrendTerm{{TrendKind::lorentzian, c, 1}, {coef(0) * std::sqrt(c)}};
  }
  return std::nullopt;
}

}  // namespace recip
