#include "recip/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "recip/error.hpp"

namespace recip {

namespace {

constexpr double pi = std::numbers::pi;

// value at t0 that makes the lattice sum of q*ln|t - t0| match its integral
// (zeta(0)' = -ln(2 pi)/2 per side), relative to the log-modulus one step away
double regularized_log(double neighbour_log, int order) {
  return neighbour_log - order * std::log(2 * pi);
}

int round_to_parity(double estimate, bool odd) {
  int q = odd ? 1 : 2;
  if (!std::isfinite(estimate)) return q;
  int r = static_cast<int>(std::lround(estimate));
  if ((r % 2 != 0) != odd) r += (estimate > r) ? 1 : -1;
  return std::max(q, r);
}

struct Step {
  double value = 0.0;  // phase increment applied
  ZeroEvent event;
  bool has_event = false;
};

class Unwrapper {
public:
  Unwrapper(const ComplexSignal& s, const PolarOptions& o, double floor)
      : sig_(s), opt_(o), floor_(floor), n_(s.values.size()) {
    low_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) low_[k] = std::abs(s.values[k]) < floor_;
  }

  bool low(std::size_t k) const { return low_[k]; }
  double mod(std::size_t k) const { return std::abs(sig_.values[k]); }
  double arg(std::size_t k) const { return std::arg(sig_.values[k]); }

  // good sample before/after k, following the cyclic wrap if allowed
  std::optional<std::size_t> prev_good(std::size_t k) const {
    for (std::size_t s = 1; s < n_; ++s) {
      if (k < s && !sig_.grid.is_cyclic()) return std::nullopt;
      std::size_t j = (k + n_ - s) % n_;
      if (!low_[j]) return j;
    }
    return std::nullopt;
  }
  std::optional<std::size_t> next_good(std::size_t k) const {
    for (std::size_t s = 1; s < n_; ++s) {
      if (k + s >= n_ && !sig_.grid.is_cyclic()) return std::nullopt;
      std::size_t j = (k + s) % n_;
      if (!low_[j]) return j;
    }
    return std::nullopt;
  }

  // step between good samples j and k, where k is `gap` samples after j
  Step step(std::size_t j, std::size_t k, std::size_t gap, double tj) const {
    Step out;
    const double d = wrap_angle(arg(k) - arg(j));
    const double dt = sig_.grid.dt;
    if (gap > 1) {
      // exact zero: flagged run strictly between j and k
      ZeroEvent ev;
      ev.exact = true;
      ev.first = (j + 1) % n_;
      ev.last = (k + n_ - 1) % n_;
      double best = INFINITY;
      for (std::size_t s = 1; s < gap; ++s) {
        std::size_t i = (j + s) % n_;
        if (mod(i) < best) {
          best = mod(i);
          ev.t0 = tj + dt * static_cast<double>(s);
        }
      }
      const bool odd = std::abs(d) > pi / 2;
      ev.order = round_to_parity(order_estimate(j, k, tj, tj + dt * static_cast<double>(gap), ev.t0),
                                 odd);
      finish(out, ev, d);
      return out;
    }
    if (std::abs(d) > pi - opt_.crossing_tolerance) {
      auto pj = prev_good(j);
      auto nk = next_good(k);
      bool dip = true;
      // a genuine zero needs the modulus to fall towards it on both sides
      if (pj && *pj != k && !(mod(*pj) > mod(j))) dip = false;
      if (nk && *nk != j && !(mod(*nk) > mod(k))) dip = false;
      if (!dip)
        fail(ErrorKind::undersampled_phase,
             "adjacent arguments differ by " + std::to_string(d) + " at sample " +
                 std::to_string(j) + " without a modulus dip");
      ZeroEvent ev;
      ev.first = j;
      ev.last = k;
      ev.order = 1;
      ev.t0 = tj + dt * mod(j) / (mod(j) + mod(k));
      finish(out, ev, d);
      return out;
    }
    out.value = d;
    return out;
  }

private:
  double order_estimate(std::size_t j, std::size_t k, double tj, double tk, double t0) const {
    double sum = 0.0;
    int count = 0;
    const double dt = sig_.grid.dt;
    auto pj = prev_good(j);
    if (pj && *pj == (j + n_ - 1) % n_) {
      double a = std::log(std::abs(tj - t0)), b = std::log(std::abs(tj - dt - t0));
      if (a != b) {
        sum += (std::log(mod(j)) - std::log(mod(*pj))) / (a - b);
        ++count;
      }
    }
    auto nk = next_good(k);
    if (nk && *nk == (k + 1) % n_) {
      double a = std::log(std::abs(tk - t0)), b = std::log(std::abs(tk + dt - t0));
      if (a != b) {
        sum += (std::log(mod(k)) - std::log(mod(*nk))) / (a - b);
        ++count;
      }
    }
    return count ? sum / count : NAN;
  }

  void finish(Step& out, ZeroEvent& ev, double d) const {
    const double smooth = wrap_angle(d - ev.order * pi);
    ev.nearest_jump = std::round((d - smooth) / pi) * pi;
    if (ev.order % 2 == 0) ev.nearest_jump = 0.0;
    switch (opt_.branch) {
      case BranchRule::nearest: ev.jump = ev.nearest_jump; break;
      case BranchRule::below: ev.jump = ev.order * pi; break;
      case BranchRule::above: ev.jump = -ev.order * pi; break;
    }
    out.value = smooth + ev.jump;
    out.event = ev;
    out.has_event = true;
  }

  const ComplexSignal& sig_;
  const PolarOptions& opt_;
  double floor_;
  std::size_t n_;
  std::vector<bool> low_;
};

std::size_t default_anchor(const TimeGrid& g) {
  double k = std::round(-g.t_start / g.dt);
  if (k < 0) return 0;
  if (k > static_cast<double>(g.n - 1)) return g.n - 1;
  return static_cast<std::size_t>(k);
}

}  // namespace

double wrap_angle(double a) {
  double r = std::remainder(a, 2 * pi);
  if (r <= -pi) r += 2 * pi;
  return r;
}

const char* to_string(BranchRule rule) {
  switch (rule) {
    case BranchRule::nearest: return "nearest";
    case BranchRule::below: return "below";
    case BranchRule::above: return "above";
  }
  return "?";
}

// ---------------------------------------------------------------------------

TimeGrid TimeGrid::uniform(double t_start, double dt, std::size_t n) {
  TimeGrid g{t_start, dt, n, std::nullopt};
  g.validate();
  return g;
}

TimeGrid TimeGrid::cyclic(double t_start, double period, std::size_t n) {
  require(n >= 2, ErrorKind::invalid_argument, "grid needs at least 2 samples");
  TimeGrid g{t_start, period / static_cast<double>(n), n, period};
  g.validate();
  return g;
}

TimeGrid TimeGrid::centered(double period, std::size_t n) { return cyclic(-period / 2, period, n); }

TimeGrid TimeGrid::from_times(std::span<const double> t, bool cyclic) {
  require(t.size() >= 2, ErrorKind::invalid_argument, "grid needs at least 2 samples");
  const std::size_t n = t.size();
  const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
  require(dt > 0, ErrorKind::non_uniform_grid, "times must increase");
  const double scale = std::max({1.0, std::abs(t.front()), std::abs(t.back())});
  for (std::size_t k = 0; k < n; ++k) {
    double expect = t.front() + dt * static_cast<double>(k);
    if (std::abs(t[k] - expect) > 1e-9 * scale + 1e-6 * dt)
      fail(ErrorKind::non_uniform_grid, "sample " + std::to_string(k) + " off the uniform grid");
  }
  TimeGrid g{t.front(), dt, n, std::nullopt};
  if (cyclic) g.period = dt * static_cast<double>(n);
  return g;
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = time(k);
  return t;
}

void TimeGrid::validate() const {
  require(n >= 2, ErrorKind::invalid_argument, "grid needs at least 2 samples");
  require(dt > 0 && std::isfinite(dt), ErrorKind::invalid_argument, "dt must be positive");
  require(std::isfinite(t_start), ErrorKind::invalid_argument, "t_start must be finite");
  if (period) {
    double p = dt * static_cast<double>(n);
    require(std::abs(*period - p) <= 1e-12 * std::abs(p), ErrorKind::invalid_argument,
            "period must equal n*dt");
  }
}

void ComplexSignal::validate() const {
  grid.validate();
  require(values.size() == grid.n, ErrorKind::invalid_argument,
          "value count does not match grid");
  for (auto& v : values)
    require(std::isfinite(v.real()) && std::isfinite(v.imag()), ErrorKind::invalid_argument,
            "signal contains non-finite values");
}

ComplexSignal ComplexSignal::sample(const TimeGrid& grid, const std::function<cplx(double)>& f,
                                    std::string label) {
  grid.validate();
  ComplexSignal s{grid, {}, std::move(label)};
  s.values.resize(grid.n);
  for (std::size_t k = 0; k < grid.n; ++k) s.values[k] = f(grid.time(k));
  return s;
}

// ---------------------------------------------------------------------------

std::size_t PolarDecomposition::flagged_count() const {
  return static_cast<std::size_t>(std::count(zero_flags.begin(), zero_flags.end(), true));
}

std::vector<double> PolarDecomposition::full_log_modulus() const {
  std::vector<double> out = log_modulus;
  if (!trend.log_modulus.empty())
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += trend.log_modulus_at(grid.time(k));
  return out;
}

std::vector<double> PolarDecomposition::full_phase() const {
  std::vector<double> out = phase;
  if (!trend.phase.empty())
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += trend.phase_at(grid.time(k));
  return out;
}

PolarDecomposition to_polar(const ComplexSignal& signal, double modulus_floor) {
  require(modulus_floor > 0, ErrorKind::invalid_argument, "modulus_floor must be positive");
  PolarOptions o;
  o.modulus_floor = modulus_floor;
  return to_polar(signal, o);
}

PolarDecomposition to_polar(const ComplexSignal& signal, const PolarOptions& options) {
  signal.validate();
  const auto& g = signal.grid;
  const std::size_t n = g.n;
  double maxabs = 0.0;
  for (auto& v : signal.values) maxabs = std::max(maxabs, std::abs(v));
  require(maxabs > 0, ErrorKind::degenerate_signal, "signal is identically zero");
  const double floor = options.modulus_floor.value_or(1e-10 * maxabs);
  require(floor > 0, ErrorKind::invalid_argument, "modulus_floor must be positive");

  Unwrapper uw(signal, options, floor);
  PolarDecomposition p;
  p.grid = g;
  p.branch = options.branch;
  p.log_modulus.assign(n, 0.0);
  p.phase.assign(n, 0.0);
  p.zero_flags.assign(n, false);

  std::size_t g0 = n;
  for (std::size_t k = 0; k < n; ++k)
    if (!uw.low(k)) {
      g0 = k;
      break;
    }
  require(g0 < n, ErrorKind::degenerate_signal, "no sample above the modulus floor");
  std::size_t g1 = g0;
  for (std::size_t k = n; k-- > 0;)
    if (!uw.low(k)) {
      g1 = k;
      break;
    }

  for (std::size_t k = 0; k < n; ++k)
    if (!uw.low(k)) p.log_modulus[k] = std::log(uw.mod(k));

  // fills a flagged run j+1..k-1 (indices modulo n) after the step is known
  auto fill_run = [&](std::size_t j, std::size_t gap, const ZeroEvent& ev) {
    const std::size_t k = (j + gap) % n;
    const double nb = std::min(p.log_modulus[j], p.log_modulus[k]);
    for (std::size_t s = 1; s < gap; ++s) {
      std::size_t i = (j + s) % n;
      p.log_modulus[i] = regularized_log(nb, ev.order);
      p.zero_flags[i] = true;
    }
  };

  p.phase[g0] = uw.arg(g0);
  std::size_t j = g0;
  while (j < g1) {
    std::size_t k = j + 1;
    while (uw.low(k)) ++k;
    Step st = uw.step(j, k, k - j, g.time(j));
    p.phase[k] = p.phase[j] + st.value;
    if (st.has_event) {
      if (st.event.exact) {
        fill_run(j, k - j, st.event);
        for (std::size_t i = j + 1; i < k; ++i) p.phase[i] = p.phase[j] + st.value / 2;
      } else {
        p.zero_flags[j] = p.zero_flags[k] = true;
      }
      p.zero_events.push_back(st.event);
    }
    j = k;
  }

  if (g.is_cyclic()) {
    const std::size_t gap = g0 + n - g1;
    Step st = uw.step(g1, g0, gap, g.time(g1));
    if (st.has_event) {
      st.event.wraps = true;
      if (st.event.exact) {
        fill_run(g1, gap, st.event);
        for (std::size_t i = g1 + 1; i < n; ++i) p.phase[i] = p.phase[g1] + st.value / 2;
        for (std::size_t i = 0; i < g0; ++i) p.phase[i] = p.phase[g0] - st.value / 2;
      } else {
        p.zero_flags[g1] = p.zero_flags[g0] = true;
      }
      if (st.event.t0 >= g.t_start + *g.period) st.event.t0 -= *g.period;
      p.zero_events.push_back(st.event);
    }
    p.period_increment = p.phase[g1] + st.value - p.phase[g0];
  } else {
    // boundary runs cannot be classified: keep the floor and the neighbour phase
    for (std::size_t i = 0; i < g0; ++i) {
      p.phase[i] = p.phase[g0];
      p.log_modulus[i] = std::log(floor);
      p.zero_flags[i] = true;
    }
    for (std::size_t i = g1 + 1; i < n; ++i) {
      p.phase[i] = p.phase[g1];
      p.log_modulus[i] = std::log(floor);
      p.zero_flags[i] = true;
    }
  }

  std::size_t anchor = options.anchor.value_or(default_anchor(g));
  require(anchor < n, ErrorKind::invalid_argument, "anchor outside the grid");
  if (uw.low(anchor)) {
    for (std::size_t s = 1; s < n; ++s) {
      if (anchor + s < n && !uw.low(anchor + s)) {
        anchor += s;
        break;
      }
      if (anchor >= s && !uw.low(anchor - s)) {
        anchor -= s;
        break;
      }
    }
  }
  p.anchor = anchor;
  const double shift = uw.arg(anchor) - p.phase[anchor];
  for (auto& v : p.phase) v += shift;
  return p;
}

PolarDecomposition rebranch(const PolarDecomposition& polar, BranchRule rule) {
  PolarDecomposition p = polar;
  p.branch = rule;
  const std::size_t n = p.grid.n;
  std::vector<double> shift(n, 0.0);
  double total = 0.0;
  for (auto& ev : p.zero_events) {
    double target = ev.nearest_jump;
    if (rule == BranchRule::below) target = ev.order * pi;
    if (rule == BranchRule::above) target = -ev.order * pi;
    const double delta = target - ev.jump;
    ev.jump = target;
    total += delta;
    if (delta == 0.0) continue;
    if (ev.wraps) {
      if (ev.exact) {
        for (std::size_t i = ev.first; i < n && ev.first > ev.last; ++i) shift[i] += delta / 2;
        // a run that does not cross the seam touches it from one side
        for (std::size_t i = ev.first; i <= ev.last && ev.first <= ev.last; ++i)
          shift[i] += (ev.last == n - 1 ? delta / 2 : -delta / 2);
        for (std::size_t i = 0; i <= ev.last && ev.first > ev.last; ++i) shift[i] -= delta / 2;
      }
      continue;
    }
    if (ev.exact) {
      for (std::size_t i = ev.first; i <= ev.last; ++i) shift[i] += delta / 2;
      for (std::size_t i = ev.last + 1; i < n; ++i) shift[i] += delta;
    } else {
      for (std::size_t i = ev.last; i < n; ++i) shift[i] += delta;
    }
  }
  const double pin = shift[p.anchor];
  for (std::size_t i = 0; i < n; ++i) p.phase[i] += shift[i] - pin;
  if (p.period_increment) *p.period_increment += total;
  return p;
}

std::vector<cplx> reassemble(const PolarDecomposition& polar) {
  auto lm = polar.full_log_modulus();
  auto ph = polar.full_phase();
  std::vector<cplx> out(lm.size());
  for (std::size_t k = 0; k < lm.size(); ++k) out[k] = std::exp(cplx(lm[k], ph[k]));
  return out;
}

}  // namespace recip
