#include <doctest.h>

#include <cmath>
#include <random>

#include "magbound/pipeline.hpp"

using namespace magbound;

// Random smooth convex radial curves: rho = 1 + sum of low-order harmonics
// with amplitudes small enough to keep the curvature positive. Fixed seed.
static DomainSpec random_convex_domain(std::mt19937& rng) {
  std::uniform_real_distribution<double> amp(-0.06, 0.06);
  std::uniform_real_distribution<double> phase(0, 2 * pi);
  double a2 = amp(rng), a3 = amp(rng) * 0.5;
  double p2 = phase(rng), p3 = phase(rng);
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i < 96; i++) {
    double th = 2 * pi * i / 96;
    double r = 1.0 + a2 * std::cos(2 * th + p2) + a3 * std::cos(3 * th + p3);
    samples.push_back({th, r});
  }
  return DomainSpec::radial_curve(samples);
}

TEST_CASE("random convex radial domains satisfy the torsion invariants") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 3; trial++) {
    auto spec = random_convex_domain(rng);
    CHECK(is_convex_sampling(spec));

    auto p = run_torsion_pipeline(spec, 0.08, RGrid{0.05, 0.99, 80});
    CHECK(p.mesh->min_angle_deg() >= 25.0 - 1e-9);

    double A = area(spec);
    CHECK(p.mesh->total_area() == doctest::Approx(A).epsilon(2e-3));
    CHECK(p.mp.value <= A / (4 * pi) * 1.001);  // Talenti
    CHECK(p.mp.hessian_det > 0);
    CHECK(p.mp.hessian_det <= 0.25 * 1.02);
    CHECK(p.mp.hessian_trace == doctest::Approx(-1.0).epsilon(0.03));

    double det = p.mp.hessian_det;
    CHECK(p.prof.F_value >= 4 * pi * 0.99);
    CHECK(p.prof.F_value <= 2 * pi / std::sqrt(det) * 1.01);
    CHECK(p.prof.G_value >= 0.99 * std::max(2 * pi * p.mp.value / std::sqrt(det), A * 0.998));
    double C = p.prof.G_value / (p.prof.F_value * p.mp.value);
    CHECK(C >= 0.99);
    CHECK(2 * std::sqrt(p.mp.value) <= std::sqrt(A / pi) * 1.001);  // rho <= R

    for (size_t i = 1; i < p.prof.r_grid.size(); i++)
      CHECK(p.prof.superlevel_area[i] > p.prof.superlevel_area[i - 1]);
  }
}

TEST_CASE("radial domain goes through the full bound with a direct solve") {
  std::mt19937 rng(11);
  auto spec = random_convex_domain(rng);
  auto p = run_torsion_pipeline(spec, 0.08, RGrid{0.05, 0.99, 80});
  double b = 0.5;
  CHECK(b * area(spec) < pi);
  BoundOptions opt;
  opt.radial_n = 1024;
  opt.with_direct = true;
  auto rep = assemble_bound(spec, b, p.v, p.mp, p.prof, opt);
  REQUIRE(rep.mu_direct.has_value());
  CHECK(*rep.mu_direct > 0);
  CHECK(*rep.mu_direct <= rep.bound_value * (1 + kCrossTol));
  CHECK(rep.bound_value <= rep.simplified_bound * (1 + 1e-9));
  CHECK(rep.C_factor >= 0.99);
}
