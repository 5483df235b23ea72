#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace recip {

using cplx = std::complex<double>;

/// Uniform time axis. A cyclic grid samples exactly one period with the
/// endpoint excluded, so `period == n * dt`.
struct TimeGrid {
  double t_start = 0.0;
  double dt = 1.0;
  std::size_t n = 0;
  std::optional<double> period;

  static TimeGrid uniform(double t_start, double dt, std::size_t n);
  static TimeGrid cyclic(double t_start, double period, std::size_t n);
  /// Cyclic grid over [-period/2, period/2); t = 0 is sample n/2 for even n.
  static TimeGrid centered(double period, std::size_t n);
  /// Builds a grid from explicit sample times, rejecting non-uniform spacing.
  static TimeGrid from_times(std::span<const double> t, bool cyclic);

  double time(std::size_t k) const { return t_start + dt * static_cast<double>(k); }
  double t_end() const { return time(n - 1); }
  std::vector<double> times() const;
  bool is_cyclic() const { return period.has_value(); }
  void validate() const;
};

/// Sampled complex amplitude phi(t).
struct ComplexSignal {
  TimeGrid grid;
  std::vector<cplx> values;
  std::string label;

  void validate() const;

  static ComplexSignal sample(const TimeGrid& grid, const std::function<cplx(double)>& f,
                              std::string label = {});
};

// ---------------------------------------------------------------------------
// Trend terms

enum class TrendKind {
  none,
  constant,       // a
  linear,         // a + b t
  polynomial,     // sum_{j<=degree} a_j t^j
  log_quadratic,  // a ln(t^2 + c)
  arctan,         // a arctan(t / sqrt(c))
  lorentzian,     // a / (t^2 + c)
  dispersive,     // a t / (t^2 + c)
};

const char* to_string(TrendKind kind);
TrendKind trend_kind_from_string(const std::string& name);

/// One analytic basis form; `scale` is the c parameter of the rational and
/// logarithmic forms, `degree` applies to polynomials.
struct BasisForm {
  TrendKind kind = TrendKind::none;
  double scale = 1.0;
  int degree = 1;

  std::size_t size() const;
  void values(double t, std::span<double> out) const;
};

struct TrendTerm {
  BasisForm form;
  std::vector<double> coefficients;

  double evaluate(double t) const;
  std::string describe() const;
};

struct TrendRecord {
  std::vector<TrendTerm> log_modulus;
  std::vector<TrendTerm> phase;

  double log_modulus_at(double t) const;
  double phase_at(double t) const;
  bool empty() const { return log_modulus.empty() && phase.empty(); }
};

// ---------------------------------------------------------------------------
// Polar decomposition

/// Branch convention across amplitude zeros on the real axis.
/// `below`: continuation through the lower half plane, phase steps +order*pi.
/// `above`: continuation through the upper half plane, phase steps -order*pi.
/// `nearest`: sample-to-sample nearest branch (+-pi for odd order, 0 for even).
enum class BranchRule { nearest, below, above };

const char* to_string(BranchRule rule);

/// A real-axis zero detected while unwrapping. Samples first..last are flagged.
struct ZeroEvent {
  double t0 = 0.0;
  std::size_t first = 0;
  std::size_t last = 0;
  int order = 1;
  double jump = 0.0;          // branch step applied to the phase (multiple of pi)
  double nearest_jump = 0.0;  // step the nearest-branch rule would take
  bool exact = false;         // some sample fell below the modulus floor
  bool wraps = false;         // straddles the end/start of a cyclic grid
};

struct PolarDecomposition {
  TimeGrid grid;
  std::vector<double> log_modulus;
  std::vector<double> phase;
  TrendRecord trend;
  std::vector<bool> zero_flags;
  std::vector<ZeroEvent> zero_events;
  BranchRule branch = BranchRule::nearest;
  std::size_t anchor = 0;
  /// Cyclic grids: phase(t + period) - phase(t) of the stored phase array.
  std::optional<double> period_increment;

  std::size_t flagged_count() const;
  /// Stored arrays with the trend record added back.
  std::vector<double> full_log_modulus() const;
  std::vector<double> full_phase() const;
};

struct PolarOptions {
  /// Absolute floor; defaults to 1e-10 * max|values|.
  std::optional<double> modulus_floor;
  BranchRule branch = BranchRule::nearest;
  /// Adjacent raw args within this distance of pi count as a sign flip.
  double crossing_tolerance = 0.25;
  /// Sample whose phase is pinned to its principal argument; defaults to the
  /// sample nearest t = 0.
  std::optional<std::size_t> anchor;
};

PolarDecomposition to_polar(const ComplexSignal& signal, const PolarOptions& options = {});
PolarDecomposition to_polar(const ComplexSignal& signal, double modulus_floor);

/// Re-applies the phase steps at recorded zeros under a different rule.
PolarDecomposition rebranch(const PolarDecomposition& polar, BranchRule rule);

/// exp(log_modulus + i phase) including the trend record.
std::vector<cplx> reassemble(const PolarDecomposition& polar);

// ---------------------------------------------------------------------------
// Trend subtraction

struct TrendRequest {
  std::vector<BasisForm> log_modulus;
  std::vector<BasisForm> phase;
};

struct TrendFitOptions {
  double max_condition = 1e12;
  /// Line grids: fit only samples with |t - centre| >= fit_outside, so the
  /// forms capture the asymptotics and the core stays in the remainder.
  std::optional<double> fit_outside;
};

/// Least-squares fit of the requested forms to log_modulus and phase
/// separately; fitted terms are appended to the trend record. On cyclic grids
/// a linear phase term takes its slope from the exact per-period increment.
PolarDecomposition subtract_trend(const PolarDecomposition& polar, const TrendRequest& request,
                                  const TrendFitOptions& options = {});

/// Adds the trend record back into the arrays and clears it.
PolarDecomposition restore_trend(const PolarDecomposition& polar);

/// Cyclic grids: removes the exact secular slope so the phase is periodic.
PolarDecomposition remove_secular_phase(const PolarDecomposition& polar);

// ---------------------------------------------------------------------------
// CSV

void write_signal_csv(std::ostream& out, const ComplexSignal& signal);
ComplexSignal read_signal_csv(std::istream& in, bool cyclic);
void write_polar_csv(std::ostream& out, const PolarDecomposition& polar);
/// Reads t, log_modulus, phase, flagged; the trend record is empty.
PolarDecomposition read_polar_csv(std::istream& in, bool cyclic);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

}  // namespace recip
