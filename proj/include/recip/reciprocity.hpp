#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "recip/hilbert.hpp"
#include "recip/signal.hpp"

namespace recip {

struct ReciprocityReport {
  Direction direction = Direction::modulus_to_phase;
  int sign = +1;
  std::string method;  // "periodic", "spectral" or "pv_quadrature"
  double residual_l2 = 0.0;   // root mean square over included samples
  double residual_max = 0.0;
  double normalized_l2 = 0.0;  // ||r|| / ||direct - mean(direct)||
  std::size_t included = 0;
  std::size_t excluded = 0;   // inside the zero exclusion windows
  std::size_t outside_window = 0;
  double excluded_residual_max = 0.0;
  std::vector<std::string> trend_terms;
  double tail_estimate = 0.0;
  /// Normalized residual of the rejected sign divided by that of the chosen one.
  double sign_margin = 0.0;
  std::vector<double> t;
  std::vector<double> direct;
  std::vector<double> reconstructed;  // shifted by the mean offset over included samples
  std::vector<double> residual;
  std::vector<bool> included_mask;
};

struct VerifyOptions {
  TransformOptions transform;
  bool auto_sign = true;
  double sign_margin = 2.0;
  /// Half-width around zero events and flagged samples excluded from the
  /// metrics; defaults to 10 dt.
  std::optional<double> exclusion;
  /// Metrics restricted to |t - centre| <= window on line grids; defaults to
  /// T/4 with T the transform half-width.
  std::optional<double> window;
  /// Forms fitted before transforming.
  std::optional<TrendRequest> fit;
  TrendFitOptions fit_options;
  TailOptions tails;
};

/// Runs both directions. On cyclic grids the phase is first continued
/// through real-axis zeros on the branch matching the sign and its exact
/// secular slope is removed. Throws sign_ambiguous if neither sign wins by
/// the required margin.
std::vector<ReciprocityReport> verify(const PolarDecomposition& polar, const VerifyOptions& options);

/// Split relations: arg chi = H[log|chi_-|] - H[log|chi_+|] and
/// log|chi| = H[arg chi_+] - H[arg chi_-], compared against the combined
/// amplitude. chi_minus is analytic below the axis, chi_plus above.
std::vector<ReciprocityReport> verify_split(const PolarDecomposition& chi_plus,
                                            const PolarDecomposition& chi_minus,
                                            const VerifyOptions& options);

/// JSON object for one report (without the per-sample arrays).
std::string report_json(const ReciprocityReport& r);

/// Plot data: t, then direct, reconstructed, residual and included for every
/// report, columns prefixed by the direction name.
void write_report_csv(std::ostream& out, const std::vector<ReciprocityReport>& reports);

}  // namespace recip
