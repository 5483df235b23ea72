#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recip/signal.hpp"

namespace recip {

enum class HilbertMethod { pv_quadrature, spectral };

const char* to_string(HilbertMethod m);
HilbertMethod hilbert_method_from_string(const std::string& name);

/// H[f](t) = (1/pi) PV int f(t') / (t' - t) dt', scaled by `sign`.
/// With this kernel H[cos] = -sin and H[sin] = cos.
struct TransformOptions {
  HilbertMethod method = HilbertMethod::spectral;
  /// Half-width T of the evaluation window; 0 means half the grid span.
  double half_width = 0.0;
  /// Exclusion half-width around flagged samples for residual metrics.
  double exclusion = 0.0;
  int sign = +1;

  void validate() const;
};

/// Line transform of samples on a uniform grid. The spectral method pads to
/// twice the length and corrects for the periodic images to first order.
std::vector<double> hilbert_line(std::span<const double> f, const TimeGrid& grid,
                                 const TransformOptions& opts);

/// Conjugate Fourier series over one period: cos(n w t) -> -sign * sin(n w t),
/// sin(n w t) -> sign * cos(n w t), mean -> 0.
std::vector<double> hilbert_periodic(std::span<const double> f, const TimeGrid& grid,
                                     const TransformOptions& opts);

// ---------------------------------------------------------------------------
// Analytic conjugate pairs

struct ConjugatePair {
  std::string name;
  std::function<double(double t, double c)> forward;
  std::function<double(double t, double c)> conjugate;  // H[forward]
  std::string validity;
  bool periodic = false;  // periodic pairs take t as an angle in (0, 2 pi) or (-pi, pi)
  double tolerance = 1e-6;
};

const std::vector<ConjugatePair>& conjugate_dictionary();
const ConjugatePair& conjugate_pair(const std::string& name);

/// H applied to a trend term (sign +1), expressed as another trend term.
/// Returns nullopt for polynomial-type terms, which have no decaying conjugate.
std::optional<TrendTerm> conjugate_term(const TrendTerm& term);

// ---------------------------------------------------------------------------
// Numeric transform of a remainder plus analytic conjugates of trend terms

enum class Direction { modulus_to_phase, phase_to_modulus };

const char* to_string(Direction d);

struct TailOptions {
  /// Fit these forms before transforming (appended to the polar trend).
  std::optional<TrendRequest> fit;
  /// Edge value of the remainder relative to its peak above which the
  /// decay check fails (line grids only).
  double edge_threshold = 0.05;
  /// Edge values below this absolute size always pass.
  double decay_floor = 1e-9;
  /// Cyclic grids: transform the real-axis zero singularities analytically.
  bool subtract_zero_events = true;
};

struct ConjugateResult {
  std::vector<double> values;
  std::vector<TrendTerm> source_terms;     // trend terms conjugated analytically
  std::vector<TrendTerm> conjugate_terms;  // their conjugates, signed as added
  std::vector<TrendTerm> excluded_terms;   // polynomial-type terms left out
  std::size_t zero_events_used = 0;
  double edge_max = 0.0;
  double tail_estimate = 0.0;
};

/// modulus_to_phase returns sign * H[log|chi|]; phase_to_modulus returns
/// -sign * H[arg chi]. The stored (detrended) arrays are transformed
/// numerically and the analytic conjugates of the trend terms are added.
ConjugateResult conjugate_with_tails(const PolarDecomposition& polar, Direction direction,
                                     const TransformOptions& opts, const TailOptions& tails = {});

}  // namespace recip
