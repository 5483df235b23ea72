#include "recip/zeros.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>

#include "csv.hpp"
#include "fft.hpp"
#include "recip/error.hpp"

namespace recip {

namespace {

constexpr double pi = std::numbers::pi;

// p(z)/p'(z); for |z| > 1 through the reversed polynomial to avoid overflow
cplx newton_ratio(const std::vector<cplx>& c, cplx z) {
  const std::size_t D = c.size() - 1;
  if (std::abs(z) <= 1.0) {
    cplx p = c[D], dp = 0.0;
    for (std::size_t m = D; m-- > 0;) {
      dp = dp * z + p;
      p = p * z + c[m];
    }
    if (p == 0.0) return 0.0;
    return p / dp;
  }
  const cplx y = 1.0 / z;
  cplx q = c[0], dq = 0.0;
  for (std::size_t m = 1; m <= D; ++m) {
    dq = dq * y + q;
    q = q * y + c[m];
  }
  if (q == 0.0) return 0.0;
  // p = z^D q(y), p' = z^(D-1) (D q - y q'(y))
  return z / (static_cast<double>(D) - y * dq / q);
}

double scaled_residual(const std::vector<cplx>& c, cplx z, double cmax) {
  const std::size_t D = c.size() - 1;
  const double r = std::abs(z);
  if (r <= 1.0) {
    cplx p = c[D];
    for (std::size_t m = D; m-- > 0;) p = p * z + c[m];
    return std::abs(p) / cmax;
  }
  const cplx y = 1.0 / z;
  cplx q = c[0];
  for (std::size_t m = 1; m <= D; ++m) q = q * y + c[m];
  return std::abs(q) / cmax;  // |p| / |z|^D
}

bool aberth(const std::vector<cplx>& c, std::vector<cplx>& z, int max_iter) {
  const std::size_t D = z.size();
  std::vector<bool> done(D, false);
  for (int it = 0; it < max_iter; ++it) {
    bool all = true;
    for (std::size_t i = 0; i < D; ++i) {
      if (done[i]) continue;
      const cplx ratio = newton_ratio(c, z[i]);
      cplx sum = 0.0;
      for (std::size_t j = 0; j < D; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      const cplx w = ratio / (1.0 - ratio * sum);
      z[i] -= w;
      if (std::abs(w) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(z[i]) ||
          ratio == 0.0)
        done[i] = true;
      else
        all = false;
    }
    if (all) return true;
  }
  return false;
}

std::vector<cplx> companion_roots(const std::vector<cplx>& c) {
  const auto D = static_cast<Eigen::Index>(c.size() - 1);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(D, D);
  for (Eigen::Index i = 1; i < D; ++i) M(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < D; ++i) M(i, D - 1) = -c[static_cast<std::size_t>(i)] / c.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
  if (es.info() != Eigen::Success) fail(ErrorKind::non_convergence, "companion eigensolver failed");
  std::vector<cplx> out(static_cast<std::size_t>(D));
  for (Eigen::Index i = 0; i < D; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return out;
}

void polish(const std::vector<cplx>& c, std::vector<cplx>& z) {
  for (auto& r : z)
    for (int k = 0; k < 3; ++k) {
      const cplx step = newton_ratio(c, r);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      const cplx cand = r - step;
      if (scaled_residual(c, cand, 1.0) <= scaled_residual(c, r, 1.0)) r = cand;
      else break;
    }
}

ZeroClass class_of(cplx z, double tol) {
  const double r = std::abs(z);
  if (r < 1.0 - tol) return ZeroClass::upper;
  if (r > 1.0 + tol) return ZeroClass::lower;
  return ZeroClass::axis;
}

std::vector<Zero> cluster(const std::vector<cplx>& z, const std::vector<double>& resid,
                          double radius, double omega, double tol) {
  const std::size_t D = z.size();
  std::vector<std::size_t> parent(D);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = i + 1; j < D; ++j)
      if (std::abs(z[i] - z[j]) <= radius * std::max(1.0, std::abs(z[i])))
        parent[find(i)] = find(j);
  std::vector<Zero> out;
  std::vector<long> slot(D, -1);
  for (std::size_t i = 0; i < D; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(out.size());
      out.push_back({0.0, 0.0, 0, ZeroClass::axis, 0.0});
    }
    auto& e = out[static_cast<std::size_t>(slot[r])];
    e.z += z[i];
    e.multiplicity += 1;
    e.residual = std::max(e.residual, resid[i]);
  }
  for (auto& e : out) {
    e.z /= static_cast<double>(e.multiplicity);
    e.t = time_of_zero(e.z, omega);
    e.cls = class_of(e.z, tol);
  }
  std::sort(out.begin(), out.end(), [](const Zero& a, const Zero& b) {
    if (a.t.real() != b.t.real()) return a.t.real() < b.t.real();
    return a.t.imag() < b.t.imag();
  });
  return out;
}

}  // namespace

const char* to_string(ZeroClass c) {
  switch (c) {
    case ZeroClass::upper: return "upper";
    case ZeroClass::lower: return "lower";
    case ZeroClass::axis: return "axis";
  }
  return "?";
}

cplx TrigPolynomial::operator()(cplx z) const {
  cplx p = 0.0;
  for (std::size_t m = coeffs.size(); m-- > 0;) p = p * z + coeffs[m];
  return p;
}

cplx TrigPolynomial::at(cplx t) const {
  const cplx z = std::exp(cplx(0, 1) * omega * t);
  return (*this)(z) * std::pow(z, lowest_power);
}

double TrigPolynomial::max_coefficient() const {
  double m = 0.0;
  for (auto& c : coeffs) m = std::max(m, std::abs(c));
  return m;
}

void TrigPolynomial::validate() const {
  require(omega > 0 && std::isfinite(omega), ErrorKind::invalid_argument,
          "fundamental frequency must be positive");
  require(!coeffs.empty(), ErrorKind::degenerate_signal, "polynomial has no coefficients");
  require(coeffs.front() != 0.0 && coeffs.back() != 0.0, ErrorKind::invalid_argument,
          "end coefficients must be nonzero");
  if (time_inversion_invariant)
    for (auto& c : coeffs)
      require(c.imag() == 0.0, ErrorKind::invalid_argument,
              "time-inversion invariant polynomial needs real coefficients");
}

TrigPolynomial TrigPolynomial::centered(double omega, std::vector<cplx> coeffs) {
  require(coeffs.size() % 2 == 1, ErrorKind::invalid_argument,
          "centred form needs 2N+1 coefficients");
  TrigPolynomial p{omega, std::move(coeffs), 0, false};
  p.lowest_power = -static_cast<int>(p.coeffs.size() / 2);
  p.validate();
  return p;
}

TrigPolynomial fit_trig_polynomial(const ComplexSignal& signal, int N, const FitOptions& options,
                                   FitReport* report) {
  signal.validate();
  const auto& g = signal.grid;
  require(g.is_cyclic(), ErrorKind::not_cyclic, "fit needs a cyclic grid");
  require(N >= 0, ErrorKind::invalid_argument, "N must be non-negative");
  const std::size_t n = g.n;
  require(n >= 4 * static_cast<std::size_t>(N) + 4, ErrorKind::invalid_argument,
          "need at least 4N+4 samples");
  const double omega = 2 * pi / *g.period;
  auto C = detail::dft(signal.values, detail::FftDirection::forward);
  double total = 0.0, kept = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    C[k] /= static_cast<double>(n);
    const double e = std::norm(C[k]);
    total += e;
    if (std::labs(detail::bin_frequency(k, n)) <= N) kept += e;
  }
  require(total > 0, ErrorKind::degenerate_signal, "signal is identically zero");
  const double alias = (total - kept) / total;
  if (alias > options.alias_tol)
    fail(ErrorKind::aliasing, "fraction " + std::to_string(alias) +
                                  " of the energy lies above the retained band");

  std::vector<cplx> c(2 * static_cast<std::size_t>(N) + 1);
  for (int p = -N; p <= N; ++p) {
    const std::size_t k = static_cast<std::size_t>((p % static_cast<long>(n) + static_cast<long>(n)) %
                                                   static_cast<long>(n));
    c[static_cast<std::size_t>(p + N)] =
        C[k] * std::exp(cplx(0, -1) * (static_cast<double>(p) * omega * g.t_start));
  }
  double cmax = 0.0;
  for (auto& v : c) cmax = std::max(cmax, std::abs(v));
  std::size_t lo = 0, hi = c.size();
  while (lo < hi && std::abs(c[lo]) < options.truncate_rel * cmax) ++lo;
  while (hi > lo && std::abs(c[hi - 1]) < options.truncate_rel * cmax) --hi;

  TrigPolynomial poly;
  poly.omega = omega;
  poly.coeffs.assign(c.begin() + static_cast<long>(lo), c.begin() + static_cast<long>(hi));
  poly.lowest_power = static_cast<int>(lo) - N;
  if (options.time_inversion_invariant) {
    for (auto& v : poly.coeffs) {
      require(std::abs(v.imag()) <= 1e-8 * cmax, ErrorKind::invalid_argument,
              "coefficients are not real; signal is not time-inversion invariant");
      v = v.real();
    }
    poly.time_inversion_invariant = true;
  }
  poly.validate();

  if (report) {
    report->requested_n = N;
    report->alias_fraction = alias;
    report->trimmed = c.size() - poly.coeffs.size();
    double maxv = 0.0, err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      maxv = std::max(maxv, std::abs(signal.values[j]));
      err = std::max(err, std::abs(signal.values[j] - poly.at(g.time(j))));
    }
    report->reconstruction_error = err / maxv;
  }
  return poly;
}

cplx time_of_zero(cplx z, double omega) {
  // principal log puts arg in (-pi, pi]; a root on the negative axis with a
  // round-off imaginary part of either sign goes to +pi
  double a = std::arg(z);
  if (a < -std::numbers::pi + 1e-9) a += 2 * std::numbers::pi;
  return cplx(a, -std::log(std::abs(z))) / omega;
}

int ZeroSet::total_multiplicity() const {
  int s = 0;
  for (auto& e : entries) s += e.multiplicity;
  return s;
}

int ZeroSet::count(ZeroClass c) const {
  int s = 0;
  for (auto& e : entries)
    if (e.cls == c) s += e.multiplicity;
  return s;
}

ZeroSet find_zeros(const TrigPolynomial& p, const RootOptions& options) {
  p.validate();
  const std::size_t D = p.degree();
  require(D >= 1, ErrorKind::invalid_argument, "polynomial degree must be at least 1");
  const auto& c = p.coeffs;
  const double cmax = p.max_coefficient();

  std::vector<cplx> z(D);
  const double r0 = std::pow(std::abs(c.front()) / std::abs(c.back()), 1.0 / static_cast<double>(D));
  for (std::size_t i = 0; i < D; ++i)
    z[i] = std::polar(r0, 2 * pi * static_cast<double>(i) / static_cast<double>(D) + 0.4);

  auto certify = [&](const std::vector<cplx>& roots, std::vector<double>& res) {
    res.resize(roots.size());
    bool ok = true;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      res[i] = scaled_residual(c, roots[i], cmax);
      if (!(res[i] <= options.residual_tol)) ok = false;
    }
    return ok;
  };

  std::vector<double> res;
  aberth(c, z, options.max_iterations);
  polish(c, z);
  if (!certify(z, res)) {
    z = companion_roots(c);
    polish(c, z);
    if (!certify(z, res)) {
      std::string msg = "root residuals not certified; partial roots:";
      for (std::size_t i = 0; i < z.size(); ++i)
        msg += " (" + std::to_string(z[i].real()) + "," + std::to_string(z[i].imag()) +
               " res " + std::to_string(res[i]) + ")";
      fail(ErrorKind::non_convergence, msg);
    }
  }

  ZeroSet zs;
  zs.omega = p.omega;
  zs.tol = options.axis_tol;
  zs.degree = static_cast<int>(D);
  zs.c_low = c.front();
  zs.entries = cluster(z, res, options.cluster_radius, p.omega, options.axis_tol);
  return zs;
}

ZeroSet zero_set_from_roots(const std::vector<cplx>& z, double omega, double tol) {
  require(!z.empty(), ErrorKind::invalid_argument, "no roots given");
  ZeroSet zs;
  zs.omega = omega;
  zs.tol = tol;
  zs.degree = static_cast<int>(z.size());
  zs.entries = cluster(z, std::vector<double>(z.size(), 0.0), 1e-6, omega, tol);
  return zs;
}

ZeroSet classify(const ZeroSet& zs, double tol) {
  ZeroSet out = zs;
  out.tol = tol;
  for (auto& e : out.entries) e.cls = class_of(e.z, tol);
  return out;
}

MigrationReport perturbation_scan(const ZeroSet& base, const ZeroSet& perturbed,
                                  double epsilon_threshold) {
  require(epsilon_threshold > 0, ErrorKind::invalid_argument, "epsilon must be positive");
  struct Item {
    const Zero* zero;
    std::size_t entry;
  };
  auto expand = [](const ZeroSet& s) {
    std::vector<Item> v;
    for (std::size_t i = 0; i < s.entries.size(); ++i)
      for (int m = 0; m < s.entries[i].multiplicity; ++m) v.push_back({&s.entries[i], i});
    return v;
  };
  const auto A = expand(base), B = expand(perturbed);
  struct Pair {
    double d;
    std::size_t a, b;
  };
  std::vector<Pair> pairs;
  pairs.reserve(A.size() * B.size());
  for (std::size_t a = 0; a < A.size(); ++a)
    for (std::size_t b = 0; b < B.size(); ++b)
      pairs.push_back({std::abs(A[a].zero->z - B[b].zero->z), a, b});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    if (x.d != y.d) return x.d < y.d;
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });

  MigrationReport rep;
  std::vector<bool> usedA(A.size(), false), usedB(B.size(), false);
  for (const auto& pr : pairs) {
    if (usedA[pr.a] || usedB[pr.b]) continue;
    usedA[pr.a] = usedB[pr.b] = true;
    ZeroMigration m{*A[pr.a].zero, *B[pr.b].zero, pr.d, 0.0};
    m.dt = std::abs(time_of_zero(m.after.z / m.before.z, base.omega));
    rep.max_dz = std::max(rep.max_dz, m.dz);
    rep.max_dt = std::max(rep.max_dt, m.dt);
    rep.moved.push_back(m);
  }
  for (std::size_t b = 0; b < B.size(); ++b)
    if (!usedB[b]) {
      const double r = std::abs(B[b].zero->z);
      rep.created.push_back({*B[b].zero, r, r > 1.0 / epsilon_threshold || r < epsilon_threshold});
    }
  for (std::size_t a = 0; a < A.size(); ++a)
    if (!usedA[a]) rep.lost.push_back(*A[a].zero);

  // nearest-neighbour map old -> new must be injective across distinct entries
  std::vector<long> owner(perturbed.entries.size(), -1);
  for (std::size_t i = 0; i < base.entries.size(); ++i) {
    std::size_t best = 0;
    double bd = INFINITY;
    for (std::size_t j = 0; j < perturbed.entries.size(); ++j) {
      const double d = std::abs(base.entries[i].z - perturbed.entries[j].z);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    if (perturbed.entries.empty()) break;
    if (owner[best] >= 0 && perturbed.entries[best].multiplicity < 2) {
      const auto& o = base.entries[static_cast<std::size_t>(owner[best])];
      rep.ambiguities.push_back("base zeros at t=" + std::to_string(o.t.real()) + "+" +
                                std::to_string(o.t.imag()) + "i and t=" +
                                std::to_string(base.entries[i].t.real()) + "+" +
                                std::to_string(base.entries[i].t.imag()) +
                                "i share the nearest perturbed zero");
    }
    owner[best] = static_cast<long>(i);
  }
  return rep;
}

MigrationReport perturbation_scan(const TrigPolynomial& base, const TrigPolynomial& perturbed,
                                  double epsilon_threshold, const RootOptions& options) {
  require(std::abs(base.omega - perturbed.omega) <= 1e-12 * base.omega,
          ErrorKind::invalid_argument, "polynomials have different fundamental frequencies");
  return perturbation_scan(find_zeros(base, options), find_zeros(perturbed, options),
                           epsilon_threshold);
}

bool in_zero_window(const Zero& z, double window, double tol) {
  // roots on the seam come back on either side of it
  const double h = window / 2;
  return z.t.real() > -h + tol && z.t.real() <= h + tol;
}

namespace {
bool in_window(const Zero& z, std::optional<double> window, double tol) {
  return !window || in_zero_window(z, *window, tol);
}
}  // namespace

std::size_t zero_table_rows(const ZeroSet& zs, std::optional<double> window) {
  std::size_t rows = 0;
  for (const auto& z : zs.entries)
    if (in_window(z, window, zs.tol)) rows += static_cast<std::size_t>(z.multiplicity);
  return rows;
}

void write_zero_table_csv(std::ostream& out, const ZeroSet& zs, std::optional<double> window) {
  using detail::num;
  out << "re_t,im_t,re_z,im_z,multiplicity,class\n";
  for (const auto& z : zs.entries) {
    if (!in_window(z, window, zs.tol)) continue;
    for (int k = 0; k < z.multiplicity; ++k)
      out << num(z.t.real()) << ',' << num(z.t.imag()) << ',' << num(z.z.real()) << ','
          << num(z.z.imag()) << ',' << z.multiplicity << ',' << to_string(z.cls) << '\n';
  }
}

}  // namespace recip
