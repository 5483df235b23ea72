#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "recip/error.hpp"
#include "recip/models.hpp"
#include "recip/reciprocity.hpp"

using namespace recip;
namespace {
constexpr double pi = std::numbers::pi;

ComplexSignal product(const std::vector<cplx>& roots, std::size_t n) {
  auto g = TimeGrid::cyclic(-pi, 2 * pi, n);
  return ComplexSignal::sample(g, [&](double t) {
    cplx v = 1.0;
    for (const auto& r : roots) v *= 1.0 - std::polar(1.0, t) / r;
    return v;
  });
}

void check_report_invariants(const ReciprocityReport& r) {
  CHECK(r.sign * r.sign == 1);
  CHECK(r.residual_l2 <= r.residual_max * std::sqrt(static_cast<double>(r.included)) + 1e-300);
  CHECK(r.residual.size() == r.t.size());
}

VerifyOptions line_options(double scale, double span) {
  VerifyOptions vo;
  vo.fit = TrendRequest{{{TrendKind::log_quadratic, scale, 1}}, {{TrendKind::arctan, scale, 1}}};
  vo.fit_options.fit_outside = 0.25 * span;
  vo.window = 20.0;
  return vo;
}
}  // namespace

TEST_SUITE("reciprocity") {

TEST_CASE("single zero in the lower half plane") {
  auto reps = verify(to_polar(product({2.0}, 512)), {});
  REQUIRE(reps.size() == 2);
  for (const auto& r : reps) {
    CHECK(r.sign == -1);
    CHECK(r.residual_max <= 1e-8);
    CHECK(r.method == "periodic");
    check_report_invariants(r);
  }
  CHECK(reps[0].direction == Direction::modulus_to_phase);
  CHECK(reps[1].direction == Direction::phase_to_modulus);
}

TEST_CASE("single zero in the upper half plane, with winding") {
  auto reps = verify(to_polar(product({0.5}, 512)), {});
  for (const auto& r : reps) {
    CHECK(r.sign == +1);
    CHECK(r.residual_max <= 1e-8);
  }
}

TEST_CASE("degree-20 synthetic, all zeros outside the circle") {
  std::vector<cplx> roots;
  for (int k = 0; k < 10; ++k) {
    const cplx z = std::polar(1.15 + 0.2 * k, 0.25 + 0.3 * k);
    roots.push_back(z);
    roots.push_back(std::conj(z));
  }
  auto reps = verify(to_polar(product(roots, 1 << 14)), {});
  for (const auto& r : reps) {
    CHECK(r.sign == -1);
    CHECK(r.residual_max <= 1e-6);
    CHECK(r.sign_margin >= 2.0);
  }
}

TEST_CASE("mirror: the conjugate signal flips the sign, residuals unchanged") {
  auto s = product({2.0, cplx(1.5, 1.0), cplx(1.5, -1.0)}, 1024);
  auto m = s;
  for (auto& v : m.values) v = std::conj(v);
  auto a = verify(to_polar(s), {}), b = verify(to_polar(m), {});
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a[i].sign == -b[i].sign);
    CHECK(a[i].normalized_l2 == doctest::Approx(b[i].normalized_l2).epsilon(1e-6));
    CHECK(std::abs(a[i].residual_max - b[i].residual_max) < 1e-12);
  }
}

TEST_CASE("zeros on both sides: sign-ambiguous") {
  try {
    verify(to_polar(product({2.0, 0.5}, 1024)), {});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::sign_ambiguous);
  }
  // a fixed sign is reported, not refused
  VerifyOptions vo;
  vo.auto_sign = false;
  auto reps = verify(to_polar(product({2.0, 0.5}, 1024)), vo);
  CHECK(reps[0].normalized_l2 > 1e-3);
}

TEST_CASE("doublet K/omega = 8: phase from modulus") {
  auto p = TwoStateParams::from_ratio(8);
  auto g = TimeGrid::cyclic(0, 4 * pi, 4096);
  auto s = ComplexSignal::sample(g, [&](double t) { return two_state_amplitude(p, t); });
  VerifyOptions vo;
  vo.exclusion = 0.05;
  auto reps = verify(to_polar(s), vo);
  for (const auto& r : reps) {
    CHECK(r.sign == +1);
    CHECK(r.residual_l2 <= 1e-2);
    CHECK(r.normalized_l2 <= 1e-2);
    CHECK(r.excluded > 0);
    check_report_invariants(r);
  }
}

TEST_CASE("free packet, both methods") {
  PacketParams pp;
  const double scale = std::pow(2 * pp.m * pp.delta * pp.delta, 2);
  const std::size_t n = 1 << 15;
  auto g = TimeGrid::uniform(-200, 400.0 / n, n);
  auto s = ComplexSignal::sample(g, [&](double t) { return std::exp(packet_log_amplitude(pp, t)); });
  for (auto m : {HilbertMethod::spectral, HilbertMethod::pv_quadrature}) {
    auto vo = line_options(scale, 400);
    vo.transform.method = m;
    auto reps = verify(to_polar(s), vo);
    for (const auto& r : reps) {
      CAPTURE(to_string(r.direction));
      CHECK(r.sign == +1);
      CHECK(r.residual_max <= 1e-3);
      CHECK(r.outside_window > 0);
      CHECK(r.trend_terms.size() >= 1);
      check_report_invariants(r);
    }
  }
}

TEST_CASE("split relations: one trivial part reduces to verify") {
  // |z| > 1 zeros sit below the axis, so that product is analytic above
  auto plus = product({2.0, cplx(1.3, 1.1), cplx(1.3, -1.1)}, 1024);
  auto minus = product({0.5, cplx(0.3, 0.4), cplx(0.3, -0.4)}, 1024);
  auto one = ComplexSignal::sample(plus.grid, [](double) { return cplx(1.0, 0.0); });
  SUBCASE("chi_minus = 1") {
    auto split = verify_split(to_polar(plus), to_polar(one), {});
    auto plain = verify(to_polar(plus), {});
    CHECK(plain[0].sign == -1);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(split[i].residual_max <= 1e-8);
      CHECK(plain[i].residual_max <= 1e-8);
    }
  }
  SUBCASE("chi_plus = 1") {
    auto split = verify_split(to_polar(one), to_polar(minus), {});
    auto plain = verify(to_polar(minus), {});
    CHECK(plain[0].sign == +1);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(split[i].residual_max <= 1e-8);
      CHECK(plain[i].residual_max <= 1e-8);
    }
  }
  SUBCASE("both parts") {
    for (const auto& r : verify_split(to_polar(plus), to_polar(minus), {})) CHECK(r.residual_max <= 1e-8);
  }
}

TEST_CASE("split relations: expanding potential") {
  ExpandingParams p;
  const std::size_t n = 1 << 15;
  auto g = TimeGrid::uniform(-400, 800.0 / n, n);
  auto run = [&](double f1, double f2) {
    auto part = [&](HalfPlane h) {
      return to_polar(ComplexSignal::sample(g, [&](double t) { return std::exp(expanding_part(p, f1, f2, h, t)); }));
    };
    auto vo = line_options(p.c, 800);
    vo.fit = TrendRequest{{{TrendKind::log_quadratic, p.c, 1}, {TrendKind::lorentzian, p.c, 1}},
                          {{TrendKind::arctan, p.c, 1}, {TrendKind::dispersive, p.c, 1}}};
    return verify_split(part(HalfPlane::upper), part(HalfPlane::lower), vo);
  };
  SUBCASE("equal split: no phase") {
    auto reps = run(0.5, 0.5);
    double worst = 0.0;
    for (std::size_t k = 0; k < reps[0].t.size(); ++k)
      if (reps[0].included_mask[k]) worst = std::max(worst, std::abs(reps[0].reconstructed[k]));
    CHECK(worst <= 1e-10);
  }
  SUBCASE("generic fractions") {
    for (const auto& r : run(0.2, 0.7)) CHECK(r.residual_max <= 1e-4);
  }
  SUBCASE("preset fractions") {
    const auto w = expanding_preset(p);
    for (const auto& r : run((1 - w.w1) / 2, (1 - w.w2) / 2)) CHECK(r.residual_max <= 1e-4);
  }
}

TEST_CASE("report output") {
  auto reps = verify(to_polar(product({2.0}, 64)), {});
  auto j = nlohmann::json::parse(report_json(reps[0]));
  for (const char* key : {"direction", "sign", "method", "residual_l2", "residual_max", "excluded", "tail_estimate"})
    CHECK(j.contains(key));
  std::ostringstream out;
  write_report_csv(out, reps);
  const std::string head = out.str().substr(0, out.str().find('\n'));
  CHECK(head.rfind("t,modulus_to_phase_direct,", 0) == 0);
  CHECK(head.find("phase_to_modulus_residual") != std::string::npos);
}

}
