#include "recip/hilbert.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "recip/error.hpp"

namespace recip {

using detail::bin_frequency;
using detail::dft;
using detail::FftDirection;

namespace {

constexpr double pi = std::numbers::pi;

void check_input(std::span<const double> f, const TimeGrid& grid) {
  grid.validate();
  require(f.size() == grid.n, ErrorKind::invalid_argument, "array length does not match grid");
  for (double v : f) require(std::isfinite(v), ErrorKind::invalid_argument, "NaN in input");
}

// i*sign(k) multiplier applied in place to a DFT spectrum
void conjugate_spectrum(std::vector<cplx>& F) {
  const std::size_t n = F.size();
  for (std::size_t k = 0; k < n; ++k) {
    const long fk = bin_frequency(k, n);
    if (fk == 0 || 2 * static_cast<std::size_t>(std::labs(fk)) == n)
      F[k] = 0.0;
    else
      F[k] *= fk > 0 ? cplx(0, 1) : cplx(0, -1);
  }
}

std::vector<double> pv_quadrature(std::span<const double> f) {
  const std::size_t n = f.size();
  const std::size_t m = std::bit_ceil(2 * n);
  std::vector<cplx> a(m, 0.0), g(m, 0.0);
  for (std::size_t j = 0; j < n; ++j) a[j] = f[j];
  // y_i = sum_j f_j / (j - i) = (f * g)_i with g[d] = -1/d
  for (std::size_t d = 1; d < n; ++d) {
    g[d] = -1.0 / static_cast<double>(d);
    g[m - d] = 1.0 / static_cast<double>(d);
  }
  auto A = dft(a, FftDirection::forward);
  auto G = dft(g, FftDirection::forward);
  for (std::size_t k = 0; k < m; ++k) A[k] *= G[k];
  auto y = dft(A, FftDirection::backward);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    // singular cell: the linear part of f contributes its central difference
    double local;
    if (n < 2)
      local = 0.0;
    else if (i == 0)
      local = f[1] - f[0];
    else if (i == n - 1)
      local = f[n - 1] - f[n - 2];
    else
      local = 0.5 * (f[i + 1] - f[i - 1]);
    out[i] = (y[i].real() / static_cast<double>(m) + local) / pi;
  }
  return out;
}

std::vector<double> spectral_line(std::span<const double> f, const TimeGrid& grid) {
  const std::size_t n = f.size();
  const std::size_t m = 2 * n;
  std::vector<cplx> a(m, 0.0);
  for (std::size_t j = 0; j < n; ++j) a[j] = f[j];
  auto F = dft(a, FftDirection::forward);
  conjugate_spectrum(F);
  auto y = dft(F, FftDirection::backward);
  // cot kernel of the padded period L versus 1/(pi x): first-order image term
  const double L = grid.dt * static_cast<double>(m);
  double M = 0.0, m1 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    M += f[j] * grid.dt;
    m1 += grid.time(j) * f[j] * grid.dt;
  }
  const double c = pi / (3.0 * L * L);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = y[i].real() / static_cast<double>(m) + c * (m1 - grid.time(i) * M);
  return out;
}

}  // namespace

const char* to_string(HilbertMethod m) {
  return m == HilbertMethod::spectral ? "spectral" : "pv_quadrature";
}

HilbertMethod hilbert_method_from_string(const std::string& name) {
  if (name == "spectral") return HilbertMethod::spectral;
  if (name == "pv_quadrature" || name == "pv") return HilbertMethod::pv_quadrature;
  fail(ErrorKind::invalid_argument, "unknown method '" + name + "'");
}

void TransformOptions::validate() const {
  require(sign == 1 || sign == -1, ErrorKind::invalid_argument, "sign must be +1 or -1");
  require(half_width >= 0, ErrorKind::invalid_argument, "half_width must be non-negative");
  require(exclusion >= 0, ErrorKind::invalid_argument, "exclusion must be non-negative");
}

std::vector<double> hilbert_line(std::span<const double> f, const TimeGrid& grid,
                                 const TransformOptions& opts) {
  opts.validate();
  check_input(f, grid);
  auto out = opts.method == HilbertMethod::spectral ? spectral_line(f, grid) : pv_quadrature(f);
  if (opts.sign < 0)
    for (auto& v : out) v = -v;
  return out;
}

std::vector<double> hilbert_periodic(std::span<const double> f, const TimeGrid& grid,
                                     const TransformOptions& opts) {
  opts.validate();
  check_input(f, grid);
  require(grid.is_cyclic(), ErrorKind::not_cyclic, "periodic transform needs a grid period");
  const std::size_t n = f.size();
  std::vector<cplx> a(f.begin(), f.end());
  auto F = dft(a, FftDirection::forward);
  conjugate_spectrum(F);
  auto y = dft(F, FftDirection::backward);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = opts.sign * y[i].real() / static_cast<double>(n);
  return out;
}

const char* to_string(Direction d) {
  return d == Direction::modulus_to_phase ? "modulus_to_phase" : "phase_to_modulus";
}

ConjugateResult conjugate_with_tails(const PolarDecomposition& input, Direction direction,
                                     const TransformOptions& opts, const TailOptions& tails) {
  opts.validate();
  const PolarDecomposition polar = tails.fit ? subtract_trend(input, *tails.fit) : input;
  const auto& g = polar.grid;
  const std::size_t n = g.n;
  const bool to_phase = direction == Direction::modulus_to_phase;
  // arg = s H[log|chi|], log|chi| = -s H[arg]
  const double factor = to_phase ? opts.sign : -opts.sign;

  ConjugateResult res;
  std::vector<double> rem = to_phase ? polar.log_modulus : polar.phase;
  std::vector<double> analytic(n, 0.0);

  if (g.is_cyclic()) {
    if (!to_phase && polar.period_increment)
      require(std::abs(*polar.period_increment) < 1e-6, ErrorKind::invalid_argument,
              "phase carries a secular increment; subtract the linear trend first");
    const double P = *g.period;
    if (tails.subtract_zero_events && !polar.zero_events.empty()) {
      for (const auto& ev : polar.zero_events) {
        // q ln|2 sin(psi/2)| <-> q (pi - psi)/2, psi = 2 pi (t - t0)/P in [0, 2 pi)
        const double q = to_phase ? ev.order : ev.jump / pi;
        for (std::size_t k = 0; k < n; ++k) {
          double psi = std::fmod(2 * pi * (g.time(k) - ev.t0) / P, 2 * pi);
          if (psi < 0) psi += 2 * pi;
          const double saw = (psi == 0.0) ? 0.0 : (pi - psi) / 2;
          // on the zero itself take the same lattice regularization as to_polar
          const double lsin = std::min(psi, 2 * pi - psi) < 1e-9 * g.dt / P
                                  ? std::log(g.dt / P)
                                  : std::log(std::abs(2 * std::sin(psi / 2)));
          if (to_phase) {
            rem[k] -= q * lsin;
            analytic[k] += factor * q * saw;
          } else {
            rem[k] -= q * saw;
            analytic[k] -= factor * q * lsin;
          }
        }
      }
      res.zero_events_used = polar.zero_events.size();
      // flagged samples carry the singular part: bridge them linearly
      std::vector<std::size_t> good;
      for (std::size_t k = 0; k < n; ++k)
        if (!polar.zero_flags[k]) good.push_back(k);
      require(!good.empty(), ErrorKind::degenerate_signal, "every sample is flagged");
      for (std::size_t gi = 0; gi < good.size(); ++gi) {
        const std::size_t a = good[gi];
        const std::size_t b = good[(gi + 1) % good.size()];
        const std::size_t gap = (b + n - a) % n == 0 ? n : (b + n - a) % n;
        for (std::size_t s = 1; s < gap; ++s) {
          const double w = static_cast<double>(s) / static_cast<double>(gap);
          rem[(a + s) % n] = (1 - w) * rem[a] + w * rem[b];
        }
      }
    }
  }

  const auto& terms = to_phase ? polar.trend.log_modulus : polar.trend.phase;
  for (const auto& term : terms) {
    if (term.form.kind == TrendKind::constant || term.form.kind == TrendKind::none) {
      res.source_terms.push_back(term);  // conjugate vanishes
      continue;
    }
    auto conj = conjugate_term(term);
    if (!conj) {
      res.excluded_terms.push_back(term);
      continue;
    }
    for (auto& c : conj->coefficients) c *= factor;
    res.source_terms.push_back(term);
    res.conjugate_terms.push_back(*conj);
  }
  if (g.is_cyclic() && !res.conjugate_terms.empty())
    fail(ErrorKind::invalid_argument, "line dictionary terms are not periodic");

  std::vector<double> numeric;
  if (g.is_cyclic()) {
    numeric = hilbert_periodic(rem, g, {HilbertMethod::spectral, 0.0, 0.0, +1});
  } else {
    double peak = 0.0;
    for (double v : rem) peak = std::max(peak, std::abs(v));
    res.edge_max = std::max(std::abs(rem.front()), std::abs(rem.back()));
    if (res.edge_max > tails.decay_floor && res.edge_max > tails.edge_threshold * peak)
      fail(ErrorKind::decay_check,
           "remainder at window edge is " + std::to_string(res.edge_max / peak) +
               " of its peak; declare trend forms so it decays");
    const double T = opts.half_width > 0 ? opts.half_width : 0.5 * g.dt * static_cast<double>(n - 1);
    res.tail_estimate = res.edge_max * std::log(std::max(T, std::numbers::e)) / T;
    numeric = hilbert_line(rem, g, {opts.method, opts.half_width, 0.0, +1});
  }

  res.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double v = factor * numeric[k] + analytic[k];
    const double t = g.time(k);
    for (const auto& c : res.conjugate_terms) v += c.evaluate(t);
    res.values[k] = v;
  }
  return res;
}

}  // namespace recip
