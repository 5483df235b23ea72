#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "recip/signal.hpp"

namespace recip {

// ---------------------------------------------------------------------------
// Two-state doublet, H(t) = G/2 [[-cos wt, sin wt], [sin wt, cos wt]]

struct TwoStateParams {
  double G = 1.0;
  double omega = 1.0;

  double K() const;
  /// K/omega is an integer (to 1e-9).
  bool cyclic() const;
  void validate() const;
  /// Parameters with K = ratio * omega.
  static TwoStateParams from_ratio(double ratio, double omega = 1.0);
};

/// Ground-state component C_g at complex t.
cplx two_state_amplitude(const TwoStateParams& p, cplx t);

// ---------------------------------------------------------------------------
// Expanding harmonic potential

struct ExpandingParams {
  double c = 1.0;
  double omega0 = 0.0;
  double m = 1.0;
  double x = 0.0;

  double omega() const;  // sqrt(omega0^2 + c)
  /// m omega x^2, the strength of the Lorentzian term.
  double strength() const;
  void validate() const;
};

double expanding_log_modulus(const ExpandingParams& p, double t);

/// Phase for the split in which fractions f1, f2 of the log and Lorentzian
/// terms are analytic in the upper half plane:
///   -(1-2 f1)/2 arctan(t/sqrt c) + (1-2 f2) m w x^2 t / (2 sqrt(c) (t^2+c)).
/// Requires f1, f2 in [0, 1].
double expanding_phase(const ExpandingParams& p, double f1, double f2, double t);

/// Weights w1 = 1-2 f1 and w2 = 1-2 f2 of the preset split.
struct SplitWeights {
  double w1 = 0.0;
  double w2 = 0.0;
};

/// w1 = 2 omega / sqrt(c), w2 = 4 sqrt(c) / omega. These lie outside [0, 1]
/// in f for every admissible parameter set; the phase formula is applied as is.
SplitWeights expanding_preset(const ExpandingParams& p);
double expanding_phase_weighted(const ExpandingParams& p, SplitWeights w, double t);

enum class HalfPlane { upper, lower };

/// log chi_+ (upper: analytic above the axis) or log chi_- on the real axis.
/// The modulus parts are f_j resp. (1 - f_j) times the two terms; the phases
/// are the matching conjugates, so log chi_+ + log chi_- reproduces the full
/// amplitude with phase expanding_phase(p, f1, f2, t).
cplx expanding_part(const ExpandingParams& p, double f1, double f2, HalfPlane part, double t);

// ---------------------------------------------------------------------------
// Free wave packet

struct PacketParams {
  double m = 1.0;
  double delta = 1.0;
  double k_mom = 0.0;
  double x = 1.0;

  void validate() const;
  /// Branch point of the logarithm, t = 2 i m delta^2.
  cplx singularity() const;
};

cplx packet_log_amplitude(const PacketParams& p, cplx t);

// ---------------------------------------------------------------------------
// Frozen Gaussian on a harmonic surface

struct FrozenGaussianParams {
  double m = 1.0;
  double omega = 1.0;
  double x0 = 1.0;
  double x = 0.0;

  void validate() const;
};

/// log g with the action term taken as int_0^t (<p>^2/m - <H>) dt'.
cplx frozen_gaussian_log(const FrozenGaussianParams& p, cplx t);

/// Secular (linear in t) part of frozen_gaussian_log: i * rate * t.
double frozen_gaussian_secular_rate(const FrozenGaussianParams& p);

// ---------------------------------------------------------------------------
// Finite-dimensional propagation, dC/dt = -i G h(t) C

struct MatrixHamiltonian {
  std::size_t dim = 2;
  double G = 1.0;
  std::function<Eigen::MatrixXcd(double)> h;
  /// Driving angular frequency used by the resolution check; 0 if static.
  double drive_omega = 0.0;
  std::string label;
};

MatrixHamiltonian two_state_hamiltonian(const TwoStateParams& p);

/// Adds eps cos(2 omega t) to the (1,1) element of the Hamiltonian.
MatrixHamiltonian perturbed_two_state(const TwoStateParams& p, double eps);

/// max |dh_nm/dt| / G sampled on the grid (central differences).
double adiabaticity_ratio(const MatrixHamiltonian& H, const TimeGrid& grid);

struct PropagateOptions {
  /// Time at which the state equals c0; must be a grid point.
  double t_initial = 0.0;
  int substeps = 1;
  double max_norm_drift = 1e-6;
  double hermiticity_tol = 1e-12;
};

struct PropagationResult {
  std::vector<ComplexSignal> components;
  double max_norm_drift = 0.0;
  double max_hermiticity_error = 0.0;
  double adiabaticity = 0.0;
  /// dt exceeds min(2 pi / (10 G max|h|), 2 pi / (100 omega_drive)).
  bool under_resolved = false;
};

/// Classical fourth-order Runge-Kutta integration on the grid spacing.
PropagationResult propagate(const MatrixHamiltonian& H, const Eigen::VectorXcd& c0,
                            const TimeGrid& grid, const PropagateOptions& options = {});

}  // namespace recip
