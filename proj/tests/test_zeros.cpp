#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "recip/error.hpp"
#include "recip/models.hpp"
#include "recip/zeros.hpp"

using namespace recip;
namespace {
constexpr double pi = std::numbers::pi;

struct Solved {
  TrigPolynomial poly;
  ZeroSet zeros;
  FitReport report;
};

Solved solve_doublet(double ratio, std::size_t n = 4096) {
  auto p = TwoStateParams::from_ratio(ratio);
  auto g = TimeGrid::cyclic(0, 4 * pi, n);
  auto s = ComplexSignal::sample(g, [&](double t) { return two_state_amplitude(p, t); });
  Solved r;
  r.poly = fit_trig_polynomial(s, 128, {}, &r.report);
  r.zeros = find_zeros(r.poly);
  return r;
}

// the zeros listed for K/omega = 8, upper half of the 2 pi window
const std::vector<cplx> figure_one = {
    {2.67544, 0.131736}, {2.27494, 0.170594}, {1.87939, 0.198225}, {1.48612, 0.222569},
    {1.09515, 0.247513}, {0.70866, 0.276858}, {0.33624, 0.314448}};
}  // namespace

TEST_SUITE("zeros") {

TEST_CASE("z - 2") {
  TrigPolynomial p{1.0, {-2.0, 1.0}, 0, false};
  auto zs = find_zeros(p);
  REQUIRE(zs.entries.size() == 1);
  CHECK(std::abs(zs.entries[0].z - 2.0) < 1e-14);
  CHECK(std::abs(zs.entries[0].t - cplx(0, -std::log(2.0))) < 1e-14);
  CHECK(zs.entries[0].cls == ZeroClass::lower);
}

TEST_CASE("1 + z^2") {
  TrigPolynomial p{1.0, {1.0, 0.0, 1.0}, 0, false};
  auto zs = find_zeros(p);
  REQUIRE(zs.entries.size() == 2);
  std::vector<double> re;
  for (const auto& z : zs.entries) {
    CHECK(z.cls == ZeroClass::axis);
    CHECK(std::abs(z.t.imag()) < 1e-14);
    re.push_back(z.t.real());
  }
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-pi / 2));
  CHECK(re[1] == doctest::Approx(pi / 2));
}

TEST_CASE("fit of e^(i W t) + 2") {
  const double W = 1.5;
  auto g = TimeGrid::cyclic(0, 2 * pi / W, 64);
  auto s = ComplexSignal::sample(g, [&](double t) { return std::exp(cplx(0, W * t)) + 2.0; });
  auto p = fit_trig_polynomial(s, 8);
  REQUIRE(p.degree() == 1);
  CHECK(p.omega == doctest::Approx(W));
  CHECK(p.lowest_power == 0);
  CHECK(std::abs(p.coeffs[0] - 2.0) < 1e-14);
  CHECK(std::abs(p.coeffs[1] - 1.0) < 1e-14);
  auto zs = find_zeros(p);
  REQUIRE(zs.entries.size() == 1);
  CHECK(std::abs(zs.entries[0].t - cplx(pi / W, -std::log(2.0) / W)) < 1e-13);
  CHECK(zs.entries[0].cls == ZeroClass::lower);
}

TEST_CASE("fit refuses a zero signal and an aliased one") {
  auto g = TimeGrid::cyclic(0, 2 * pi, 64);
  auto z = ComplexSignal::sample(g, [](double) { return cplx(0, 0); });
  CHECK_THROWS_AS(fit_trig_polynomial(z, 4), Error);
  auto hi = ComplexSignal::sample(g, [](double t) { return 1.0 + std::exp(cplx(0, 20 * t)); });
  try {
    fit_trig_polynomial(hi, 8);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::aliasing);
  }
}

TEST_CASE("doublet K/omega = 8: degree 34, reconstruction") {
  auto r = solve_doublet(8);
  CHECK(r.poly.degree() == 34);
  CHECK(r.poly.lowest_power == -17);
  CHECK(r.poly.omega == doctest::Approx(0.5));
  CHECK(r.report.reconstruction_error <= 1e-10);
  CHECK(r.zeros.total_multiplicity() == 34);
  for (const auto& z : r.zeros.entries) CHECK(z.residual <= 1e-8);
}

TEST_CASE("doublet K/omega = 8: the listed zeros") {
  auto r = solve_doublet(8);
  std::vector<Zero> win;
  for (const auto& z : r.zeros.entries)
    if (in_zero_window(z, 2 * pi, r.zeros.tol)) win.push_back(z);
  auto near = [&](cplx t) {
    double d = 1e300;
    for (const auto& z : win) d = std::min(d, std::abs(z.t - t));
    return d;
  };
  for (const auto& t : figure_one) {
    CAPTURE(t);
    CHECK(near(t) < 5e-4);
    CHECK(near(cplx(-t.real(), t.imag())) < 5e-4);
  }
  // the entry printed without an imaginary unit sits on the imaginary axis
  CHECK(near(cplx(0, 0.340873)) < 5e-4);
  // one double zero on the axis at +pi; -pi is the same point of the window
  int at_pi = 0;
  for (const auto& z : win)
    if (std::abs(z.t - pi) < 1e-6) {
      CHECK(z.cls == ZeroClass::axis);
      at_pi += z.multiplicity;
    }
  CHECK(at_pi == 2);
  CHECK(zero_table_rows(r.zeros, 2 * pi) == 17);
  for (const auto& z : win) CHECK(z.cls != ZeroClass::lower);
}

TEST_CASE("doublet zeros against Newton on the closed form") {
  auto p = TwoStateParams::from_ratio(8);
  auto r = solve_doublet(8);
  for (const auto& z : r.zeros.entries) {
    if (z.multiplicity > 1) continue;
    auto f = [&](cplx t) { return oracle::doublet_ground(p.G, p.omega, t); };
    const cplx t = oracle::newton_zero(f, z.t);
    CAPTURE(z.t);
    CHECK(std::abs(t - z.t) < 1e-9);
  }
  // the double zero: C_g and its derivative vanish at t = pi
  auto f = [&](cplx t) { return oracle::doublet_ground(p.G, p.omega, t); };
  CHECK(std::abs(f(pi)) < 1e-14);
  CHECK(std::abs((f(pi + 1e-5) - f(pi - 1e-5)) / 2e-5) < 1e-8);
}

TEST_CASE("zero count per window is 2M+1, none strictly below") {
  for (int M : {2, 3, 4, 8, 16}) {
    CAPTURE(M);
    auto r = solve_doublet(M, 8192);
    int lower = 0;
    for (const auto& z : r.zeros.entries)
      if (in_zero_window(z, 2 * pi, r.zeros.tol) && z.cls == ZeroClass::lower) lower += z.multiplicity;
    CHECK(zero_table_rows(r.zeros, 2 * pi) == static_cast<std::size_t>(2 * M + 1));
    CHECK(lower == 0);
  }
}

TEST_CASE("real coefficients: conjugate-closed zero set") {
  auto r = solve_doublet(8);
  for (const auto& c : r.poly.coeffs) CHECK(std::abs(c.imag()) <= 1e-12 * r.poly.max_coefficient());
  for (const auto& z : r.zeros.entries) {
    bool found = false;
    for (const auto& w : r.zeros.entries)
      if (std::abs(w.z - std::conj(z.z)) < 1e-6 * std::max(1.0, std::abs(z.z)) &&
          w.multiplicity == z.multiplicity)
        found = true;
    CHECK(found);
  }
}

TEST_CASE("product of root factors reproduces the polynomial at random unit-circle points") {
  auto r = solve_doublet(8);
  std::vector<cplx> roots;
  for (const auto& z : r.zeros.entries)
    for (int m = 0; m < z.multiplicity; ++m) roots.push_back(z.z);
  const cplx lead = r.poly.coeffs.back();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-pi, pi);
  for (int i = 0; i < 64; ++i) {
    const cplx z = std::polar(1.0, u(rng));
    cplx direct = 0.0;
    for (std::size_t m = r.poly.coeffs.size(); m-- > 0;) direct = direct * z + r.poly.coeffs[m];
    const cplx prod = lead * oracle::poly_from_roots(roots, z);
    CHECK(std::abs(prod - direct) <= 1e-6 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("classify thresholds") {
  const double tol = 1e-6;
  const std::vector<cplx> roots = {1.0, cplx(0, 1), 1 + 2 * tol, 1 - 2 * tol, cplx(0, -(1 + tol / 2))};
  auto zs = classify(zero_set_from_roots(roots, 1.0, tol), tol);
  REQUIRE(zs.entries.size() == 5);
  auto cls = [](const ZeroSet& s, cplx z) {
    for (const auto& e : s.entries)
      if (std::abs(e.z - z) < 1e-12) return e.cls;
    FAIL("root missing");
    return ZeroClass::axis;
  };
  CHECK(cls(zs, 1.0) == ZeroClass::axis);
  CHECK(cls(zs, cplx(0, 1)) == ZeroClass::axis);
  CHECK(cls(zs, 1 + 2 * tol) == ZeroClass::lower);
  CHECK(cls(zs, 1 - 2 * tol) == ZeroClass::upper);
  CHECK(cls(zs, roots[4]) == ZeroClass::axis);
  for (const auto& e : zs.entries)
    if (e.cls == ZeroClass::axis) CHECK(ZeroSet::outer(e));
  // a tighter tolerance moves the near-circle one off the axis
  CHECK(cls(classify(zs, tol / 10), roots[4]) == ZeroClass::lower);
}

TEST_CASE("multiplicity clustering") {
  // (z - 0.5)^3 (z + 2)
  std::vector<cplx> r = {0.5, 0.5, 0.5, -2.0};
  std::vector<cplx> c = {1.0};
  for (const auto& x : r) {
    std::vector<cplx> n(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      n[i + 1] += c[i];
      n[i] -= x * c[i];
    }
    c = n;
  }
  auto zs = find_zeros(TrigPolynomial{1.0, c, 0, false});
  CHECK(zs.total_multiplicity() == 4);
  bool triple = false;
  for (const auto& z : zs.entries)
    if (z.multiplicity == 3) triple = std::abs(z.z - 0.5) < 1e-4;
  CHECK(triple);
}

TEST_CASE("perturbation scan: identity and two new zeros") {
  auto r = solve_doublet(4);
  auto same = perturbation_scan(r.poly, r.poly, 1e-2);
  CHECK(same.created.empty());
  CHECK(same.lost.empty());
  CHECK(same.max_dz < 1e-12);

  // add eps z^(N+1) and eps z^(-N-1)
  const double eps = 1e-4;
  TrigPolynomial q = r.poly;
  q.coeffs.insert(q.coeffs.begin(), eps);
  q.coeffs.push_back(eps);
  q.lowest_power -= 1;
  auto rep = perturbation_scan(r.poly, q, 1e-2);
  REQUIRE(rep.created.size() == 2);
  std::vector<double> mods{rep.created[0].modulus, rep.created[1].modulus};
  std::sort(mods.begin(), mods.end());
  const double lead = std::abs(r.poly.coeffs.back());
  // |z| ~ lead / eps and eps / c_0 to first order
  CHECK(mods[0] == doctest::Approx(eps / std::abs(r.poly.coeffs.front())).epsilon(0.05));
  CHECK(mods[1] == doctest::Approx(lead / eps).epsilon(0.05));
  for (const auto& c : rep.created) CHECK(c.negligible);
  CHECK(rep.max_dz < 1e-2);
}

TEST_CASE("zero table CSV") {
  auto zs = zero_set_from_roots({cplx(0.5, 0), cplx(-1, 0), cplx(-1, 0)}, 1.0);
  std::ostringstream out;
  write_zero_table_csv(out, zs);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "re_t,im_t,re_z,im_z,multiplicity,class");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
  CHECK(zero_table_rows(zs) == 3);
}

}
