#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's transforms or root finder.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

// (1/pi) PV int f(t')/(t'-t) dt' over the real line, folded to
// (1/pi) int_0^inf [f(t+s) - f(t-s)]/s ds
inline double hilbert_line(const std::function<double(double)>& f, double t) {
  auto g = [&](double s) {
    if (s < 1e-7) {
      const double h = 1e-5;
      return (f(t + h) - f(t - h)) / h;  // limit 2 f'(t)
    }
    return (f(t + s) - f(t - s)) / s;
  };
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  // split so the adaptive rule sees the structure near the origin
  const double a = gauss_kronrod<double, 61>::integrate(g, 0.0, 50.0, 15, 1e-13, &err);
  const double b = gauss_kronrod<double, 61>::integrate(
      g, 50.0, std::numeric_limits<double>::infinity(), 15, 1e-13, &err);
  return (a + b) / pi;
}

// (1/2pi) PV int_{-pi}^{pi} f(t') cot((t'-t)/2) dt' for 2pi-periodic f,
// i.e. cos(n t) -> -sin(n t)
inline double hilbert_periodic(const std::function<double(double)>& f, double t) {
  auto g = [&](double s) {
    if (s < 1e-7) {
      const double h = 1e-5;
      return 2 * (f(t + h) - f(t - h)) / h;  // limit 4 f'(t)
    }
    return (f(t + s) - f(t - s)) / std::tan(s / 2);
  };
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  return gauss_kronrod<double, 61>::integrate(g, 0.0, pi, 15, 1e-13, &err) / (2 * pi);
}

// plain O(n^2) DFT: c_m = (1/n) sum_k x_k exp(-2 pi i m k / n)
inline std::vector<cplx> dft(const std::vector<cplx>& x) {
  const std::size_t n = x.size();
  std::vector<cplx> c(n);
  for (std::size_t m = 0; m < n; ++m) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      s += x[k] * std::polar(1.0, -2 * pi * static_cast<double>((m * k) % n) / static_cast<double>(n));
    c[m] = s / static_cast<double>(n);
  }
  return c;
}

// Newton on a holomorphic f with a centred-difference derivative
inline cplx newton_zero(const std::function<cplx(cplx)>& f, cplx t, int iters = 60) {
  for (int i = 0; i < iters; ++i) {
    const cplx h = 1e-6;
    const cplx d = (f(t + h) - f(t - h)) / (2.0 * h);
    const cplx step = f(t) / d;
    t -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return t;
}

// ground-state amplitude of the rotating doublet, written out independently
// of the library: cos Kt cos(wt/2) + (w/2K) sin Kt sin(wt/2) + i (G/2K) sin Kt cos(wt/2)
inline cplx doublet_ground(double G, double w, cplx t) {
  const double K = 0.5 * std::sqrt(G * G + w * w);
  return std::cos(K * t) * std::cos(w * t / 2.0) + w / (2 * K) * std::sin(K * t) * std::sin(w * t / 2.0) +
         cplx(0, G / (2 * K)) * std::sin(K * t) * std::cos(w * t / 2.0);
}

// prod (z - r_k)
inline cplx poly_from_roots(const std::vector<cplx>& roots, cplx z) {
  cplx v = 1.0;
  for (const auto& r : roots) v *= z - r;
  return v;
}

// Fourier coefficients of log(1 - z/z0) on |z| = 1 by series, |z0| > 1:
// -sum z^n / (n z0^n)
inline cplx log_one_minus(cplx z, cplx z0, int terms = 400) {
  cplx s = 0.0, w = z / z0, p = w;
  for (int n = 1; n <= terms; ++n, p *= w) s -= p / static_cast<double>(n);
  return s;
}

}  // namespace oracle
