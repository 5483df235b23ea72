#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "recip/signal.hpp"
#include "recip/zeros.hpp"

namespace recip {

enum class Provenance { from_zeros, from_samples };

const char* to_string(Provenance p);

/// Coefficients in the sign convention
///   log chi = A_0 - sum_n A_n cos(n theta) - i sum_n B_n sin(n theta),
/// theta = omega t in (-pi, pi]. B[0] is unused and kept at 0.
struct FourierPair {
  std::vector<double> A;
  std::vector<double> B;
  int n_max = 0;
  Provenance provenance = Provenance::from_zeros;
  /// Largest imaginary part left in the zero sums (from_zeros only).
  double imag_residue = 0.0;
  /// Secular phase slope divided by omega (from_samples only).
  double secular_winding = 0.0;
};

struct ZeroFourierOptions {
  /// Double roots are only good to ~sqrt(machine eps), hence the loose default.
  double max_imag_residue = 1e-8;
};

FourierPair coefficients_from_zeros(const ZeroSet& zs, int n_max,
                                    const ZeroFourierOptions& options = {});

enum class AxisGroup { outer, inner };

struct SampleFourierOptions {
  /// Branch used for real-axis zeros: `outer` continues above them (they
  /// join the |z| >= 1 group), `inner` below.
  AxisGroup axis_group = AxisGroup::outer;
  /// Fold the secular phase back into B_n through its sawtooth series.
  bool include_sawtooth = true;
  /// Drop flagged samples and renormalize the quadrature weights instead of
  /// using their cell-averaged values.
  bool exclude_flagged = false;
  /// Power L of z factored out first (phi = z^L p(z)); its winding L*theta
  /// is not part of the zero sums.
  int lowest_power = 0;
};

FourierPair coefficients_from_samples(const PolarDecomposition& polar, int n_max,
                                      const SampleFourierOptions& options = {});

struct CoefficientDiff {
  int n = 0;
  double dA = 0.0;
  double dB = 0.0;
  double relA = 0.0;
  double relB = 0.0;
};

struct ComparisonReport {
  std::vector<CoefficientDiff> rows;
  double max_dA = 0.0;
  double max_dB = 0.0;
  double l2_dA = 0.0;
  double l2_dB = 0.0;
  /// L2 with 1/n weights, used when axis zeros make the tails converge only in mean.
  double weighted_l2 = 0.0;
  bool axis_weighted = false;
  /// Case (b): |z_k + 1| for every |z| >= 1 zero and their sum.
  std::vector<double> near_minus_one;
  double near_minus_one_sum = 0.0;
};

ComparisonReport compare(const FourierPair& a, const FourierPair& b,
                         const ZeroSet* zeros = nullptr);

/// n, A_n, B_n, provenance for n = 0..n_max of each pair in turn.
void write_fourier_csv(std::ostream& out, const std::vector<const FourierPair*>& pairs);

/// Per-n |A_n - B_n| within one pair.
std::vector<double> ab_difference(const FourierPair& p);

}  // namespace recip
