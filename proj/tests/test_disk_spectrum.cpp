#include <doctest.h>

#include <cmath>

#include "magbound/disk_spectrum.hpp"
#include "oracles/shooting.hpp"

using namespace magbound;

// frozen oracle values
// shooting at 2e5 RK4 steps, bisection to machine bracket:
static constexpr double kMu_b05_m0_R1 = 0.031229644367;  // b=0.5, m=0, R=1
// first zero of J1': mu = (j'_{1,1})^2 for b=0, m=1, R=1
static constexpr double kBesselNeumann11 = 1.84118378134066;

TEST_CASE("zero field gives the zero eigenvalue with a constant profile") {
  auto res = fiber_mu1({0.0, 0, 1.0, 256});
  CHECK(res.mu1 == 0.0);
  for (double v : res.f) CHECK(v == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  auto spec = disk_mu1(0.0, 2.0, 256);
  CHECK(spec.mu1 == 0.0);
  CHECK(spec.minimizing_mode == 0);
}

TEST_CASE("fiber eigenvalue matches the shooting oracle") {
  auto res = fiber_mu1({0.5, 0, 1.0, 4096});
  CHECK(res.mu1 == doctest::Approx(kMu_b05_m0_R1).epsilon(1e-8));
  CHECK(res.mu1 < 0.5 * 0.5 / 8.0);
  double shot = oracle::shoot_mu1(0.5, 0, 1.0, 200000);
  CHECK(res.mu1 == doctest::Approx(shot).epsilon(1e-8));
}

TEST_CASE("zero field mode one reproduces the first Neumann Bessel zero") {
  auto res = fiber_mu1({0.0, 1, 1.0, 4096});
  CHECK(res.mu1 ==
        doctest::Approx(kBesselNeumann11 * kBesselNeumann11).epsilon(1e-8));
}

TEST_CASE("weak fields are minimized by the radial mode") {
  auto spec = disk_mu1(0.5, 1.0, 1024);
  CHECK(spec.minimizing_mode == 0);
  CHECK(spec.per_mode.at(1) > spec.per_mode.at(0));
  CHECK(spec.per_mode.at(-1) > spec.per_mode.at(0));
}

TEST_CASE("strict bound mu < b^2 R^2 / 8") {
  for (auto [b, R] : {std::pair{0.1, 1.0}, {0.5, 1.0}, {0.9, 1.0}, {0.3, 1.5}}) {
    auto spec = disk_mu1(b, R, 1024);
    CHECK(spec.mu1 > 0);
    CHECK(spec.mu1 < b * b * R * R / 8.0);
  }
}

TEST_CASE("small-b leading order") {
  auto spec = disk_mu1(0.1, 1.0, 2048);
  CHECK(spec.mu1 == doctest::Approx(0.1 * 0.1 / 8.0).epsilon(5e-4));
  CHECK(spec.mu1 < 0.1 * 0.1 / 8.0);
}

TEST_CASE("grid convergence is second order") {
  auto raw = [&](int n) { return fiber_mu1({0.5, 0, 1.0, n}).mu1_coarse; };
  double e1 = raw(256), e2 = raw(512), e3 = raw(1024);
  double ratio = (e1 - e2) / (e2 - e3);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("scaling identity holds to solver precision") {
  CHECK(scaling_check(0.5, 1.0, 512) == 0.0);
  CHECK(scaling_check(0.5, 2.0, 1024) < 1e-12);
  CHECK(scaling_check(0.8, 0.5, 1024) < 1e-12);
}

TEST_CASE("eigenvalue increases with the radius inside the regime") {
  auto mus = monotonicity_scan_R(1.0, {0.2, 0.4, 0.6, 0.8}, 1024);
  for (size_t i = 1; i < mus.size(); i++) CHECK(mus[i] > mus[i - 1] + 1e-8);
  auto single = monotonicity_scan_R(1.0, {0.5}, 512);
  CHECK(single.size() == 1);
  auto wide = monotonicity_scan_R(0.25, {0.5, 1.0, 1.5, 1.9}, 1024);
  for (size_t i = 1; i < wide.size(); i++) CHECK(wide[i] > wide[i - 1] + 1e-8);
}

TEST_CASE("u(b) = mu/b^2 decreases and extrapolates to R^2/8") {
  auto us = monotonicity_scan_b(1.0, {0.05, 0.1, 0.2, 0.4}, 2048);
  for (size_t i = 1; i < us.size(); i++) CHECK(us[i] < us[i - 1]);
  for (double u : us) CHECK(u < 0.125);
  double b1 = 0.05, b2 = 0.1;
  double u0 = (b2 * b2 * us[0] - b1 * b1 * us[1]) / (b2 * b2 - b1 * b1);
  CHECK(u0 == doctest::Approx(0.125).epsilon(0.01));

  auto us2 = monotonicity_scan_b(2.0, {0.01, 0.02}, 1024);
  CHECK(us2[1] < us2[0]);
  for (double u : us2) CHECK(u < 0.5);
}

TEST_CASE("mode pairing is even in the field sign") {
  auto spec = disk_mu1(0.6, 1.0, 1024);
  for (int m : {1, 2}) {
    CHECK(spec.per_mode.at(-m) > spec.per_mode.at(m));
    auto direct = fiber_mu1({0.6, -m, 1.0, 1024});
    CHECK(direct.mu1 == doctest::Approx(spec.per_mode.at(-m)).epsilon(1e-13));
  }
  // mu^{-b} = mu^{b}: flipping both signs leaves the potential unchanged
  double plus = oracle::shoot_mu1(0.4, 1, 1.0, 20000);
  double minus = oracle::shoot_mu1(-0.4, -1, 1.0, 20000);
  CHECK(plus == doctest::Approx(minus).epsilon(1e-10));
}

TEST_CASE("parameter and window errors") {
  CHECK_THROWS_AS(disk_mu1(-0.1, 1.0), ArgumentError);
  CHECK_THROWS_AS(disk_mu1(0.5, -1.0), ArgumentError);
  CHECK_THROWS_AS(fiber_mu1({0.5, 0, 1.0, 16}), ArgumentError);
  CHECK_THROWS_AS(disk_mu1(200.0, 1.0, 128), ModeScanError);
  CHECK_THROWS_AS(monotonicity_scan_R(1.0, {0.5, 1.1}, 256), ArgumentError);
  CHECK_THROWS_AS(monotonicity_scan_b(1.0, {0.2, 0.1}, 256), ArgumentError);
  CHECK_THROWS_AS(monotonicity_scan_b(1.0, {0.5, 1.2}, 256), ArgumentError);
}

TEST_CASE("ground profile interpolant is smooth and clamped") {
  auto spec = disk_mu1(0.5, 1.0, 512);
  auto itp = ground_profile_interpolant(spec.ground_r, spec.ground_profile, 1.0);
  CHECK(std::abs(itp.deriv(0.0)) < 1e-10);
  CHECK(std::abs(itp.deriv(1.0)) < 1e-10);
  for (size_t i = 0; i < spec.ground_r.size(); i += 97)
    CHECK(itp.value(spec.ground_r[i]) ==
          doctest::Approx(spec.ground_profile[i]).epsilon(1e-12));
  CHECK(itp.value(0.5) > 0);
}
