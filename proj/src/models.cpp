#include "recip/models.hpp"

#include <cmath>
#include <numbers>

#include "recip/error.hpp"

namespace recip {

namespace {
const cplx I(0.0, 1.0);
}

double TwoStateParams::K() const { return 0.5 * std::sqrt(G * G + omega * omega); }

bool TwoStateParams::cyclic() const {
  const double r = K() / omega;
  return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
}

void TwoStateParams::validate() const {
  require(G > 0 && std::isfinite(G), ErrorKind::invalid_argument, "G must be positive");
  require(omega > 0 && std::isfinite(omega), ErrorKind::invalid_argument, "omega must be positive");
}

TwoStateParams TwoStateParams::from_ratio(double ratio, double omega) {
  require(ratio > 0.5, ErrorKind::invalid_argument, "K/omega must exceed 1/2");
  TwoStateParams p{omega * std::sqrt(4 * ratio * ratio - 1), omega};
  p.validate();
  return p;
}

cplx two_state_amplitude(const TwoStateParams& p, cplx t) {
  const double K = p.K();
  const double w = p.omega;
  const cplx s = std::sin(K * t), c = std::cos(K * t);
  const cplx sh = std::sin(w * t / 2.0), ch = std::cos(w * t / 2.0);
  return c * ch + (w / (2 * K)) * s * sh + I * (p.G / (2 * K)) * s * ch;
}

// ---------------------------------------------------------------------------

double ExpandingParams::omega() const { return std::sqrt(omega0 * omega0 + c); }
double ExpandingParams::strength() const { return m * omega() * x * x; }

void ExpandingParams::validate() const {
  require(c > 0 && std::isfinite(c), ErrorKind::invalid_argument,
          "c must be positive so the singularities stay off the real axis");
  require(std::isfinite(omega0) && std::isfinite(m) && std::isfinite(x),
          ErrorKind::invalid_argument, "parameters must be finite");
}

double expanding_log_modulus(const ExpandingParams& p, double t) {
  p.validate();
  const double q = t * t + p.c;
  return -0.25 * std::log(q) - 0.5 * p.strength() / q;
}

double expanding_phase_weighted(const ExpandingParams& p, SplitWeights w, double t) {
  p.validate();
  const double sc = std::sqrt(p.c);
  return -0.5 * w.w1 * std::atan(t / sc) + w.w2 * p.strength() * t / (2 * sc * (t * t + p.c));
}

double expanding_phase(const ExpandingParams& p, double f1, double f2, double t) {
  require(f1 >= 0 && f1 <= 1 && f2 >= 0 && f2 <= 1, ErrorKind::invalid_argument,
          "split fractions must lie in [0, 1]");
  return expanding_phase_weighted(p, {1 - 2 * f1, 1 - 2 * f2}, t);
}

SplitWeights expanding_preset(const ExpandingParams& p) {
  p.validate();
  const double sc = std::sqrt(p.c);
  const double w = p.omega();
  require(w > 0, ErrorKind::invalid_argument, "preset needs omega > 0");
  return {2 * w / sc, 4 * sc / w};
}

cplx expanding_part(const ExpandingParams& p, double f1, double f2, HalfPlane part, double t) {
  p.validate();
  const double sc = std::sqrt(p.c);
  const double q = t * t + p.c;
  const double u1 = -0.25 * std::log(q);
  const double u2 = -0.5 * p.strength() / q;
  const double h1 = -0.5 * std::atan(t / sc);                // H[u1]
  const double h2 = p.strength() * t / (2 * sc * q);         // H[u2]
  if (part == HalfPlane::upper)
    return {f1 * u1 + f2 * u2, -(f1 * h1 + f2 * h2)};
  return {(1 - f1) * u1 + (1 - f2) * u2, (1 - f1) * h1 + (1 - f2) * h2};
}

// ---------------------------------------------------------------------------

void PacketParams::validate() const {
  require(m > 0 && std::isfinite(m), ErrorKind::invalid_argument, "mass must be positive");
  require(delta > 0 && std::isfinite(delta), ErrorKind::invalid_argument,
          "width must be positive");
  require(std::isfinite(k_mom) && std::isfinite(x), ErrorKind::invalid_argument,
          "parameters must be finite");
}

cplx PacketParams::singularity() const { return I * (2 * m * delta * delta); }

cplx packet_log_amplitude(const PacketParams& p, cplx t) {
  p.validate();
  const cplx a = p.delta + I * t / (2 * p.m * p.delta);
  require(std::abs(a) > 1e-300, ErrorKind::invalid_argument,
          "evaluation at the branch point t = 2 i m delta^2");
  const cplx num = p.x * p.x - 4.0 * I * p.delta * p.delta * p.k_mom * (p.x - p.k_mom * t / (2 * p.m));
  const cplx den = 4 * p.delta * p.delta + 2.0 * I * t / p.m;
  return -0.5 * std::log(a) - num / den;
}

// ---------------------------------------------------------------------------

void FrozenGaussianParams::validate() const {
  require(m > 0 && omega > 0, ErrorKind::invalid_argument, "m and omega must be positive");
  require(std::isfinite(x0) && std::isfinite(x), ErrorKind::invalid_argument,
          "parameters must be finite");
}

double frozen_gaussian_secular_rate(const FrozenGaussianParams& p) {
  return 0.5 * p.m * p.omega * p.omega * p.x0 * p.x0 - 0.5 * p.omega;
}

cplx frozen_gaussian_log(const FrozenGaussianParams& p, cplx t) {
  p.validate();
  const double w = p.omega;
  const cplx xt = p.x0 * std::cos(w * t);
  const cplx pt = -w * p.x0 * p.m * std::sin(w * t);
  const cplx dx = p.x - xt;
  // int_0^t (<p>^2/m - w/2) = m w^2 x0^2 t/2 - m w x0^2 sin(2wt)/4 - w t/2
  const cplx action = frozen_gaussian_secular_rate(p) * t -
                      0.25 * p.m * w * p.x0 * p.x0 * std::sin(2.0 * w * t);
  return -p.m * w * dx * dx / 2.0 + I * pt * dx + I * action;
}

// ---------------------------------------------------------------------------

MatrixHamiltonian two_state_hamiltonian(const TwoStateParams& p) {
  p.validate();
  MatrixHamiltonian H;
  H.dim = 2;
  H.G = p.G;
  H.drive_omega = p.omega;
  H.label = "two_state";
  const double w = p.omega;
  H.h = [w](double t) {
    Eigen::MatrixXcd h(2, 2);
    const double c = std::cos(w * t), s = std::sin(w * t);
    h << -0.5 * c, 0.5 * s, 0.5 * s, 0.5 * c;
    return h;
  };
  return H;
}

MatrixHamiltonian perturbed_two_state(const TwoStateParams& p, double eps) {
  MatrixHamiltonian H = two_state_hamiltonian(p);
  if (eps == 0.0) return H;
  auto base = H.h;
  const double w = p.omega, G = p.G;
  H.h = [base, w, G, eps](double t) {
    Eigen::MatrixXcd h = base(t);
    h(0, 0) += eps * std::cos(2 * w * t) / G;
    return h;
  };
  H.label = "two_state_perturbed";
  return H;
}

double adiabaticity_ratio(const MatrixHamiltonian& H, const TimeGrid& grid) {
  grid.validate();
  const double e = 1e-5 * std::max(grid.dt, 1e-3);
  double best = 0.0;
  for (std::size_t k = 0; k < grid.n; ++k) {
    const double t = grid.time(k);
    const Eigen::MatrixXcd d = (H.h(t + e) - H.h(t - e)) / (2 * e);
    best = std::max(best, d.cwiseAbs().maxCoeff());
  }
  return best / H.G;
}

PropagationResult propagate(const MatrixHamiltonian& H, const Eigen::VectorXcd& c0,
                            const TimeGrid& grid, const PropagateOptions& options) {
  grid.validate();
  require(H.h != nullptr, ErrorKind::invalid_argument, "Hamiltonian has no evaluator");
  require(static_cast<std::size_t>(c0.size()) == H.dim, ErrorKind::invalid_argument,
          "initial state has the wrong dimension");
  require(std::abs(c0.norm() - 1.0) <= 1e-12, ErrorKind::invalid_argument,
          "initial state must be normalized");
  require(options.substeps >= 1, ErrorKind::invalid_argument, "substeps must be positive");

  const double pos = (options.t_initial - grid.t_start) / grid.dt;
  const double k0r = std::round(pos);
  require(std::abs(pos - k0r) <= 1e-9 * std::max(1.0, std::abs(pos)) && k0r >= 0 &&
              k0r <= static_cast<double>(grid.n - 1),
          ErrorKind::invalid_argument, "t_initial must be a grid point");
  const auto k0 = static_cast<std::size_t>(k0r);

  PropagationResult res;
  const std::size_t d = H.dim;
  std::vector<Eigen::VectorXcd> states(grid.n);
  const double G = H.G;

  double hmax = 0.0;
  auto eval = [&](double t) {
    Eigen::MatrixXcd h = H.h(t);
    const double herm = (h - h.adjoint()).cwiseAbs().maxCoeff();
    res.max_hermiticity_error = std::max(res.max_hermiticity_error, herm);
    if (herm > options.hermiticity_tol)
      fail(ErrorKind::invalid_argument, "Hamiltonian is not Hermitian at t=" + std::to_string(t));
    hmax = std::max(hmax, h.cwiseAbs().maxCoeff());
    return h;
  };
  auto rhs = [&](double t, const Eigen::VectorXcd& c) -> Eigen::VectorXcd {
    return -I * G * (eval(t) * c);
  };

  auto run = [&](long dir) {
    Eigen::VectorXcd c = c0;
    const double h = dir * grid.dt / options.substeps;
    std::size_t k = k0;
    while (true) {
      const long next = static_cast<long>(k) + dir;
      if (next < 0 || next >= static_cast<long>(grid.n)) break;
      double t = grid.time(k);
      for (int s = 0; s < options.substeps; ++s) {
        const Eigen::VectorXcd a = rhs(t, c);
        const Eigen::VectorXcd b = rhs(t + h / 2, c + (h / 2) * a);
        const Eigen::VectorXcd e = rhs(t + h / 2, c + (h / 2) * b);
        const Eigen::VectorXcd f = rhs(t + h, c + h * e);
        c += (h / 6) * (a + 2 * b + 2 * e + f);
        t += h;
      }
      k = static_cast<std::size_t>(next);
      states[k] = c;
      const double drift = std::abs(c.squaredNorm() - 1.0);
      res.max_norm_drift = std::max(res.max_norm_drift, drift);
      if (drift > options.max_norm_drift)
        fail(ErrorKind::step_too_large,
             "norm drift " + std::to_string(drift) + " at t=" + std::to_string(grid.time(k)));
    }
  };
  states[k0] = c0;
  eval(grid.time(k0));
  run(+1);
  run(-1);

  res.components.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    res.components[i].grid = grid;
    res.components[i].label = "C" + std::to_string(i);
    res.components[i].values.resize(grid.n);
    for (std::size_t k = 0; k < grid.n; ++k)
      res.components[i].values[k] = states[k](static_cast<Eigen::Index>(i));
  }
  res.adiabaticity = adiabaticity_ratio(H, grid);
  double limit = 2 * std::numbers::pi / (10 * G * hmax);
  if (H.drive_omega > 0) limit = std::min(limit, 2 * std::numbers::pi / (100 * H.drive_omega));
  res.under_resolved = grid.dt > limit;
  return res;
}

}  // namespace recip
