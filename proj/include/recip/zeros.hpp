#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "recip/signal.hpp"

namespace recip {

/// phi(t) = sum_m coeffs[m] z^(m + lowest_power), z = exp(i omega t).
/// The centred form of a degree-2N series has lowest_power = -N.
struct TrigPolynomial {
  double omega = 1.0;
  std::vector<cplx> coeffs;
  int lowest_power = 0;
  bool time_inversion_invariant = false;

  std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  /// Ordinary polynomial sum_m coeffs[m] z^m.
  cplx operator()(cplx z) const;
  /// phi at complex time t.
  cplx at(cplx t) const;
  double max_coefficient() const;
  void validate() const;

  static TrigPolynomial centered(double omega, std::vector<cplx> coeffs);
};

struct FitOptions {
  /// Coefficients below this fraction of the largest are trimmed from both ends.
  double truncate_rel = 1e-12;
  /// Maximum fraction of spectral energy allowed outside the retained band.
  double alias_tol = 1e-8;
  bool time_inversion_invariant = false;
};

struct FitReport {
  int requested_n = 0;
  double alias_fraction = 0.0;
  double reconstruction_error = 0.0;  // max |phi - fit| / max |phi| on the grid
  std::size_t trimmed = 0;
};

/// Discrete Fourier coefficients of a cyclic signal for powers -N..N of
/// z = exp(2 pi i t / period), trimmed to a tight degree.
TrigPolynomial fit_trig_polynomial(const ComplexSignal& signal, int N, const FitOptions& options = {},
                                   FitReport* report = nullptr);

enum class ZeroClass { upper, lower, axis };

const char* to_string(ZeroClass c);

struct Zero {
  cplx z;
  cplx t;  // Re t in (-pi/omega, pi/omega]
  int multiplicity = 1;
  ZeroClass cls = ZeroClass::axis;
  double residual = 0.0;  // |p(z)| / (max|c| max(1,|z|)^D)
};

struct ZeroSet {
  std::vector<Zero> entries;
  double omega = 1.0;
  double tol = 1e-6;
  int degree = 0;
  /// Lowest-order coefficient of the source polynomial; sets the A_0 offset.
  cplx c_low = 1.0;

  int total_multiplicity() const;
  int count(ZeroClass c) const;
  /// |z| >= 1 group: lower half t-plane plus the real axis.
  static bool outer(const Zero& z) { return z.cls != ZeroClass::upper; }
};

struct RootOptions {
  int max_iterations = 500;
  double cluster_radius = 1e-6;
  double axis_tol = 1e-6;
  double residual_tol = 1e-8;
};

/// Roots of sum c_m z^m by Aberth-Ehrlich iteration with a companion-matrix
/// fallback and Newton polishing; every root is certified by its residual.
ZeroSet find_zeros(const TrigPolynomial& p, const RootOptions& options = {});

/// Builds a ZeroSet from given z values (e.g. synthetic amplitudes).
ZeroSet zero_set_from_roots(const std::vector<cplx>& z, double omega, double tol = 1e-6);

ZeroSet classify(const ZeroSet& zs, double tol);

cplx time_of_zero(cplx z, double omega);

/// Re t in (-window/2, window/2], edges shifted by tol.
bool in_zero_window(const Zero& z, double window, double tol);

/// re_t, im_t, re_z, im_z, multiplicity, class; one row per root counted
/// with multiplicity. With a window only zeros with Re t in
/// (-window/2, window/2] are written.
void write_zero_table_csv(std::ostream& out, const ZeroSet& zs,
                          std::optional<double> window = std::nullopt);
std::size_t zero_table_rows(const ZeroSet& zs, std::optional<double> window = std::nullopt);

struct ZeroMigration {
  Zero before;
  Zero after;
  double dz = 0.0;
  double dt = 0.0;  // |t_after - t_before| taken across the window seam
};

struct CreatedZero {
  Zero zero;
  double modulus = 0.0;
  bool negligible = false;
};

struct MigrationReport {
  std::vector<ZeroMigration> moved;
  std::vector<CreatedZero> created;
  std::vector<Zero> lost;
  std::vector<std::string> ambiguities;
  double max_dz = 0.0;
  double max_dt = 0.0;
};

/// Multiplicity-expanded nearest-neighbour matching of two zero sets.
MigrationReport perturbation_scan(const ZeroSet& base, const ZeroSet& perturbed,
                                  double epsilon_threshold);
MigrationReport perturbation_scan(const TrigPolynomial& base, const TrigPolynomial& perturbed,
                                  double epsilon_threshold, const RootOptions& options = {});

}  // namespace recip
