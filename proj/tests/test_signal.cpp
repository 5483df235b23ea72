#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "recip/error.hpp"
#include "recip/models.hpp"
#include "recip/signal.hpp"

using namespace recip;
namespace {
constexpr double pi = std::numbers::pi;
}

TEST_SUITE("signal_core") {

TEST_CASE("grid construction") {
  auto g = TimeGrid::cyclic(0.0, 2.0, 8);
  CHECK(g.dt == doctest::Approx(0.25));
  CHECK(*g.period == 2.0);
  auto c = TimeGrid::centered(4 * pi, 4096);
  CHECK(c.time(2048) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(TimeGrid::uniform(0, 0.0, 10), Error);
  CHECK_THROWS_AS(TimeGrid::uniform(0, 1.0, 1), Error);
  std::vector<double> t = {0, 1, 2.5};
  try {
    TimeGrid::from_times(t, false);
    FAIL("non-uniform grid accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::non_uniform_grid);
  }
}

TEST_CASE("quarter turns") {
  ComplexSignal s{TimeGrid::uniform(0, 1, 3), {{1, 0}, {0, 1}, {-1, 0}}, ""};
  auto p = to_polar(s);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(p.log_modulus[k]) < 1e-15);
  CHECK(p.phase[0] == doctest::Approx(0.0));
  CHECK(p.phase[1] == doctest::Approx(pi / 2));
  CHECK(p.phase[2] == doctest::Approx(pi));
}

TEST_CASE("single value e^(1+2i)") {
  ComplexSignal s{TimeGrid::uniform(0, 1, 2), {std::exp(cplx(1, 2)), std::exp(cplx(1, 2))}, ""};
  auto p = to_polar(s);
  CHECK(p.log_modulus[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.phase[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("degenerate signal") {
  ComplexSignal s{TimeGrid::uniform(0, 1, 4), std::vector<cplx>(4, 0.0), ""};
  try {
    to_polar(s);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_signal);
  }
}

TEST_CASE("undersampled phase") {
  // a half turn per step at unit modulus cannot be unwrapped
  auto g = TimeGrid::uniform(0, 1, 16);
  auto s = ComplexSignal::sample(g, [](double t) { return std::polar(1.0, pi * t); });
  try {
    to_polar(s);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::undersampled_phase);
  }
}

TEST_CASE("linear phase unwraps exactly") {
  const double alpha = 2.7;
  auto g = TimeGrid::uniform(-10, 0.05, 401);
  auto s = ComplexSignal::sample(g, [&](double t) { return std::polar(1.5, alpha * t); });
  auto p = to_polar(s);
  const double c = p.phase[0] - alpha * g.time(0);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.n; ++k)
    worst = std::max(worst, std::abs(p.phase[k] - alpha * g.time(k) - c));
  CHECK(worst < 1e-10);
  // and the offset is a whole number of turns
  CHECK(std::abs(std::remainder(c, 2 * pi)) < 1e-10);
}

TEST_CASE("round trip through polar form") {
  auto g = TimeGrid::uniform(-3, 0.01, 601);
  auto s = ComplexSignal::sample(g, [](double t) {
    return cplx(std::cos(3 * t) + 2, std::sin(t)) * std::exp(cplx(0.1 * t, t * t));
  });
  auto back = reassemble(to_polar(s));
  double worst = 0.0;
  for (std::size_t k = 0; k < g.n; ++k)
    worst = std::max(worst, std::abs(back[k] - s.values[k]) / std::abs(s.values[k]));
  CHECK(worst < 1e-12);
}

TEST_CASE("C_g: even log-modulus, odd phase, sign flips at the axis zeros") {
  auto p = TwoStateParams::from_ratio(8);
  const std::size_t n = 4096;
  auto g = TimeGrid::cyclic(0.0, 4 * pi, n);
  auto pol = to_polar(ComplexSignal::sample(g, [&](double t) { return two_state_amplitude(p, t); }));
  // zeros at t = pi and 3 pi, both hit exactly by the grid
  CHECK(pol.zero_events.size() == 2);
  for (const auto& ev : pol.zero_events) {
    CHECK(ev.order == 2);
    CHECK(ev.exact);
  }
  pol = remove_secular_phase(pol);
  double odd = 0.0, even = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    if (pol.zero_flags[k] || pol.zero_flags[n - k]) continue;
    even = std::max(even, std::abs(pol.log_modulus[k] - pol.log_modulus[n - k]));
    odd = std::max(odd, std::abs(pol.phase[k] + pol.phase[n - k]));
  }
  CHECK(even < 1e-10);
  CHECK(odd < 1e-10);
}

TEST_CASE("simple real-axis zero: branch rules") {
  // phi = t on a line grid crossing zero between samples
  auto g = TimeGrid::uniform(-1.005, 0.01, 201);
  auto s = ComplexSignal::sample(g, [](double t) { return cplx(t, 0.0); });
  auto p = to_polar(s);
  REQUIRE(p.zero_events.size() == 1);
  CHECK(p.zero_events[0].order == 1);
  CHECK(std::abs(p.zero_events[0].t0) < 1e-2);
  auto below = rebranch(p, BranchRule::below);
  auto above = rebranch(p, BranchRule::above);
  // the two continuations differ by a full turn across a simple zero
  const double step_below = below.phase.back() - below.phase.front();
  const double step_above = above.phase.back() - above.phase.front();
  CHECK(std::abs(std::abs(step_below) - pi) < 1e-12);
  CHECK(std::abs(step_below - step_above - 2 * pi) < 1e-12);
  // reassembly is unaffected by the branch choice
  auto a = reassemble(below), b = reassemble(above);
  for (std::size_t k = 0; k < g.n; ++k) CHECK(std::abs(a[k] - b[k]) < 1e-12);
}

TEST_CASE("linear trend captures slope") {
  auto g = TimeGrid::uniform(-5, 0.01, 1001);
  auto s = ComplexSignal::sample(g, [](double t) { return std::polar(1.0, 3 * t + 1e-3 * std::cos(7 * t)); });
  auto p = subtract_trend(to_polar(s), TrendRequest{{}, {{TrendKind::linear, 1.0, 1}}});
  REQUIRE(p.trend.phase.size() == 1);
  CHECK(p.trend.phase[0].coefficients[1] == doctest::Approx(3.0).epsilon(1e-6));
  double worst = 0.0;
  for (double v : p.phase) worst = std::max(worst, std::abs(v));
  CHECK(worst < 2e-3);
  // re-adding is the identity
  auto r = restore_trend(p);
  auto orig = to_polar(s);
  for (std::size_t k = 0; k < g.n; ++k) CHECK(std::abs(r.phase[k] - orig.phase[k]) < 1e-12);
}

TEST_CASE("log_quadratic trend on the packet modulus leaves a decaying remainder") {
  PacketParams pp;
  auto g = TimeGrid::uniform(-200, 400.0 / 8192, 8192);
  auto s = ComplexSignal::sample(g, [&](double t) { return std::exp(packet_log_amplitude(pp, t)); });
  TrendFitOptions fo;
  fo.fit_outside = 100;
  auto p = subtract_trend(to_polar(s), TrendRequest{{{TrendKind::log_quadratic, 4.0, 1}}, {}}, fo);
  // closed form: -1/4 ln(t^2 + 4) - 1/(t^2 + 4) + const
  CHECK(p.trend.log_modulus[0].coefficients[1] == doctest::Approx(-0.25).epsilon(1e-3));
  const double centre = std::abs(p.log_modulus[g.n / 2]);
  const double edge = std::max(std::abs(p.log_modulus.front()), std::abs(p.log_modulus.back()));
  CHECK(edge < 0.01 * centre);
}

TEST_CASE("constant trend removes the mean") {
  auto g = TimeGrid::cyclic(0, 2 * pi, 256);
  auto s = ComplexSignal::sample(g, [](double t) { return std::exp(cplx(0.3 + std::cos(t), 0.0)); });
  auto p = subtract_trend(to_polar(s), TrendRequest{{{TrendKind::constant, 1.0, 1}}, {}});
  double mean = 0.0;
  for (double v : p.log_modulus) mean += v;
  CHECK(std::abs(mean / 256) < 1e-14);
  CHECK(p.trend.log_modulus[0].coefficients[0] == doctest::Approx(0.3));
}

TEST_CASE("rank-deficient fit is refused") {
  auto g = TimeGrid::uniform(-1, 0.01, 201);
  auto s = ComplexSignal::sample(g, [](double) { return cplx(1.0, 0.0); });
  TrendRequest r{{{TrendKind::constant, 1.0, 1}, {TrendKind::polynomial, 1.0, 0}}, {}};
  try {
    subtract_trend(to_polar(s), r);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::rank_deficient);
  }
}

TEST_CASE("CSV round trip") {
  auto g = TimeGrid::cyclic(0, 1.0, 16);
  auto s = ComplexSignal::sample(g, [](double t) { return cplx(std::cos(t) / 3, std::sin(t) / 7); });
  std::stringstream ss;
  write_signal_csv(ss, s);
  auto back = read_signal_csv(ss, true);
  REQUIRE(back.values.size() == 16);
  for (std::size_t k = 0; k < 16; ++k) CHECK(back.values[k] == s.values[k]);
  CHECK(back.grid.dt == g.dt);

  std::stringstream sp;
  auto p = to_polar(s);
  write_polar_csv(sp, p);
  auto pb = read_polar_csv(sp, true);
  for (std::size_t k = 0; k < 16; ++k) CHECK(pb.phase[k] == p.phase[k]);
}

}
