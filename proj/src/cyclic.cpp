#include "recip/cyclic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "csv.hpp"
#include "recip/error.hpp"

namespace recip {

namespace {
constexpr double pi = std::numbers::pi;
}

const char* to_string(Provenance p) {
  return p == Provenance::from_zeros ? "from_zeros" : "from_samples";
}

FourierPair coefficients_from_zeros(const ZeroSet& zs, int n_max,
                                    const ZeroFourierOptions& options) {
  require(n_max >= 1, ErrorKind::invalid_argument, "n_max must be at least 1");
  require(zs.degree <= 0 || zs.total_multiplicity() == zs.degree, ErrorKind::incomplete_zero_set,
          "multiplicities sum to " + std::to_string(zs.total_multiplicity()) + ", degree is " +
              std::to_string(zs.degree));
  FourierPair fp;
  fp.n_max = n_max;
  fp.provenance = Provenance::from_zeros;
  fp.A.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  fp.B.assign(static_cast<std::size_t>(n_max) + 1, 0.0);

  double a0 = std::log(std::abs(zs.c_low));
  int inner = 0;
  for (const auto& e : zs.entries)
    if (!ZeroSet::outer(e)) {
      a0 -= e.multiplicity * std::log(std::abs(e.z));
      inner += e.multiplicity;
    }
  fp.A[0] = a0;

  double worst = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    cplx so = 0.0, si = 0.0;
    for (const auto& e : zs.entries) {
      if (ZeroSet::outer(e))
        so += static_cast<double>(e.multiplicity) * std::pow(e.z, -n);
      else
        si += static_cast<double>(e.multiplicity) * std::pow(e.z, n);
    }
    const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    const cplx a = (so + si) / static_cast<double>(n);
    const cplx b = (so - si + 2.0 * sgn * inner) / static_cast<double>(n);
    fp.A[static_cast<std::size_t>(n)] = a.real();
    fp.B[static_cast<std::size_t>(n)] = b.real();
    worst = std::max({worst, std::abs(a.imag()), std::abs(b.imag())});
  }
  fp.imag_residue = worst;
  if (worst > options.max_imag_residue)
  {
    char buf[96];
    std::snprintf(buf, sizeof buf, "zero sums leave an imaginary residue of %.3g", worst);
    fail(ErrorKind::numerical, buf);
  }
  return fp;
}

FourierPair coefficients_from_samples(const PolarDecomposition& input, int n_max,
                                      const SampleFourierOptions& options) {
  require(n_max >= 1, ErrorKind::invalid_argument, "n_max must be at least 1");
  require(input.grid.is_cyclic() && input.period_increment.has_value(), ErrorKind::not_cyclic,
          "coefficients_from_samples needs a cyclic polar decomposition");
  const std::size_t n = input.grid.n;
  require(n >= 8 * static_cast<std::size_t>(n_max), ErrorKind::invalid_argument,
          "too few samples: need n >= 8*n_max");

  PolarDecomposition p = restore_trend(input);
  p = rebranch(p, options.axis_group == AxisGroup::outer ? BranchRule::above : BranchRule::below);
  const double P = *p.grid.period;
  const double omega = 2 * pi / P;
  const double slope = *p.period_increment / P - options.lowest_power * omega;

  std::vector<double> w(n, 1.0);
  if (options.exclude_flagged)
    for (std::size_t k = 0; k < n; ++k)
      if (p.zero_flags[k]) w[k] = 0.0;
  double wsum = 0.0;
  for (double v : w) wsum += v;
  require(wsum > 0, ErrorKind::degenerate_signal, "every sample is flagged");

  FourierPair fp;
  fp.n_max = n_max;
  fp.provenance = Provenance::from_samples;
  fp.secular_winding = slope / omega;
  fp.A.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  fp.B.assign(static_cast<std::size_t>(n_max) + 1, 0.0);

  std::vector<double> rem(n);
  const double full_slope = *p.period_increment / P;
  for (std::size_t k = 0; k < n; ++k) rem[k] = p.phase[k] - full_slope * p.grid.time(k);

  double a0 = 0.0;
  for (std::size_t k = 0; k < n; ++k) a0 += w[k] * p.log_modulus[k];
  fp.A[0] = a0 / wsum;
  for (int m = 1; m <= n_max; ++m) {
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double th = m * omega * p.grid.time(k);
      a += w[k] * p.log_modulus[k] * std::cos(th);
      b += w[k] * rem[k] * std::sin(th);
    }
    a *= 2.0 / wsum;
    b *= 2.0 / wsum;
    if (options.include_sawtooth) {
      // theta = 2 sum (-1)^(m+1) sin(m theta) / m on (-pi, pi)
      const double sgn = (m % 2 == 0) ? -1.0 : 1.0;
      b += fp.secular_winding * 2.0 * sgn / m;
    }
    fp.A[static_cast<std::size_t>(m)] = -a;
    fp.B[static_cast<std::size_t>(m)] = -b;
  }
  return fp;
}

ComparisonReport compare(const FourierPair& a, const FourierPair& b, const ZeroSet* zeros) {
  require(a.n_max == b.n_max, ErrorKind::invalid_argument, "pairs have different n_max");
  ComparisonReport r;
  if (zeros) {
    r.axis_weighted = zeros->count(ZeroClass::axis) > 0;
    for (const auto& e : zeros->entries)
      if (ZeroSet::outer(e))
        for (int m = 0; m < e.multiplicity; ++m) {
          r.near_minus_one.push_back(std::abs(e.z + 1.0));
          r.near_minus_one_sum += std::abs(e.z + 1.0);
        }
  }
  double sa = 0.0, sb = 0.0, sw = 0.0;
  for (int n = 0; n <= a.n_max; ++n) {
    const auto i = static_cast<std::size_t>(n);
    CoefficientDiff d;
    d.n = n;
    d.dA = std::abs(a.A[i] - b.A[i]);
    d.dB = n == 0 ? 0.0 : std::abs(a.B[i] - b.B[i]);
    const double ma = std::max(std::abs(a.A[i]), std::abs(b.A[i]));
    const double mb = std::max(std::abs(a.B[i]), std::abs(b.B[i]));
    d.relA = ma > 0 ? d.dA / ma : 0.0;
    d.relB = mb > 0 ? d.dB / mb : 0.0;
    r.max_dA = std::max(r.max_dA, d.dA);
    r.max_dB = std::max(r.max_dB, d.dB);
    sa += d.dA * d.dA;
    sb += d.dB * d.dB;
    const double wn = (r.axis_weighted && n > 0) ? 1.0 / n : 1.0;
    sw += wn * wn * (d.dA * d.dA + d.dB * d.dB);
    r.rows.push_back(d);
  }
  r.l2_dA = std::sqrt(sa);
  r.l2_dB = std::sqrt(sb);
  r.weighted_l2 = std::sqrt(sw);
  return r;
}

std::vector<double> ab_difference(const FourierPair& p) {
  std::vector<double> d(static_cast<std::size_t>(p.n_max) + 1, 0.0);
  for (int n = 1; n <= p.n_max; ++n)
    d[static_cast<std::size_t>(n)] =
        std::abs(p.A[static_cast<std::size_t>(n)] - p.B[static_cast<std::size_t>(n)]);
  return d;
}

void write_fourier_csv(std::ostream& out, const std::vector<const FourierPair*>& pairs) {
  using detail::num;
  out << "n,A_n,B_n,provenance\n";
  for (const auto* p : pairs)
    for (int n = 0; n <= p->n_max; ++n)
      out << n << ',' << num(p->A[n]) << ',' << num(p->B[n]) << ',' << to_string(p->provenance)
          << '\n';
}

}  // namespace recip
