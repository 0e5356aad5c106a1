#include <doctest.h>

#include <cmath>
#include <memory>

#include "magbound/delaunay.hpp"
#include "magbound/level_set.hpp"
#include "magbound/torsion.hpp"

using namespace magbound;

namespace {

struct Pipeline {
  std::shared_ptr<const TriMesh> mesh;
  ScalarField v;
  MaxPoint mp;
  LevelProfile prof;
};

Pipeline run(const DomainSpec& spec, double h, RGrid grid = {0.05, 0.99, 120}) {
  Pipeline p;
  p.mesh = std::make_shared<const TriMesh>(triangulate(spec, h));
  p.v = solve_torsion(p.mesh);
  p.mp = locate_max(p.v);
  p.prof = level_profile(p.v, p.mp, grid);
  return p;
}

}  // namespace

TEST_CASE("disk level profile: every quantity is a closed form") {
  auto p = run(DomainSpec::disk(1.0), 0.06);
  for (size_t i = 0; i < p.prof.r_grid.size(); i++) {
    double r = p.prof.r_grid[i];
    CHECK(p.prof.inv_grad_integral[i] == doctest::Approx(4 * pi).epsilon(0.01));
    CHECK(p.prof.grad_over_r2_integral[i] == doctest::Approx(pi).epsilon(0.01));
    CHECK(p.prof.superlevel_area[i] == doctest::Approx(pi * r * r).epsilon(0.01));
    CHECK(p.prof.level_length[i] == doctest::Approx(2 * pi * r).epsilon(0.01));
  }
  CHECK(p.prof.F_value == doctest::Approx(4 * pi).epsilon(0.01));
  CHECK(p.prof.G_value == doctest::Approx(pi).epsilon(0.01));
}

TEST_CASE("ellipse level profile: F and G from the closed-form torsion") {
  auto p = run(DomainSpec::ellipse(2.0, 1.0), 0.06);
  double gamma = 2.0 / 4.0 + 2.0 / 1.0;
  CHECK(p.prof.F_value == doctest::Approx(pi * gamma * 2.0).epsilon(0.01));  // 5 pi
  CHECK(p.prof.G_value == doctest::Approx(2 * pi).epsilon(0.01));
  for (size_t i = 0; i < p.prof.r_grid.size(); i += 7) {
    double r = p.prof.r_grid[i];
    CHECK(p.prof.superlevel_area[i] == doctest::Approx(2 * pi * r * r).epsilon(0.015));
  }
}

TEST_CASE("superlevel areas rise monotonically to the mesh area") {
  auto p = run(DomainSpec::superellipse(4, 1.0), 0.07);
  for (size_t i = 1; i < p.prof.r_grid.size(); i++)
    CHECK(p.prof.superlevel_area[i] > p.prof.superlevel_area[i - 1]);
  CHECK(p.prof.superlevel_area.back() ==
        doctest::Approx(p.prof.mesh_area).epsilon(0.03));
  CHECK(p.prof.superlevel_area.back() < p.prof.mesh_area);
}

TEST_CASE("area-route formulas agree with the line-integral route") {
  for (auto spec : {DomainSpec::disk(1.0), DomainSpec::ellipse(2.0, 1.0)}) {
    auto p = run(spec, 0.06);
    auto alt = level_profile_via_areas(p.prof, p.mp);
    CHECK(alt.f_rel_gap < 0.01);
    CHECK(alt.g_rel_gap < 0.01);
  }
  auto pd = run(DomainSpec::disk(1.0), 0.06);
  auto alt = level_profile_via_areas(pd.prof, pd.mp);
  CHECK(alt.F_alt == doctest::Approx(4 * pi).epsilon(0.01));
  CHECK(alt.G_alt == doctest::Approx(pi).epsilon(0.01));
}

TEST_CASE("level length grows linearly in r") {
  for (auto spec : {DomainSpec::disk(1.0), DomainSpec::ellipse(2.0, 1.0),
                    DomainSpec::superellipse(4, 1.0)}) {
    auto p = run(spec, 0.07);
    double lo = 1e300, hi = 0;
    for (size_t i = 0; i < p.prof.r_grid.size(); i++) {
      double ratio = p.prof.level_length[i] / p.prof.r_grid[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CHECK(lo > 0);
    CHECK(hi / lo < 10.0);
  }
}

TEST_CASE("co-area closure recovers the mesh area") {
  for (auto spec : {DomainSpec::disk(1.0), DomainSpec::ellipse(2.0, 1.0),
                    DomainSpec::superellipse(4, 1.0)}) {
    auto p = run(spec, 0.06, RGrid{0.02, 0.995, 300});
    double closure = coarea_closure_area(p.prof);
    CHECK(closure == doctest::Approx(p.prof.mesh_area).epsilon(0.005));
  }
}

TEST_CASE("per-level co-area integral never drops below 4 pi") {
  auto p = run(DomainSpec::superellipse(4, 1.0), 0.06, RGrid{0.02, 0.995, 200});
  for (double f : p.prof.inv_grad_integral) CHECK(f >= 4 * pi * 0.995);
}

TEST_CASE("geometric sandwiches for F, G, and the bound factor") {
  for (auto spec : {DomainSpec::disk(1.0), DomainSpec::ellipse(2.0, 1.0),
                    DomainSpec::superellipse(4, 1.0)}) {
    auto p = run(spec, 0.06, RGrid{0.02, 0.995, 200});
    double det = p.mp.hessian_det;
    CHECK(p.prof.F_value >= 4 * pi * 0.995);
    CHECK(p.prof.F_value <= 2 * pi / std::sqrt(det) * 1.005);
    CHECK(p.prof.G_value >=
          0.995 * std::max(2 * pi * p.mp.value / std::sqrt(det), area(spec) * 0.999));
    double C = p.prof.G_value / (p.prof.F_value * p.mp.value);
    CHECK(C >= 0.995);
  }
}

TEST_CASE("trial field values and gradient bound") {
  auto p = run(DomainSpec::disk(1.0), 0.06);
  auto psi = trial_field(p.v, p.mp);

  double min_psi = 1e300;
  for (int d = 0; d < psi.space->num_dofs(); d++) {
    if (psi.space->on_boundary(d)) CHECK(psi.nodal[d] == 1.0);
    min_psi = std::min(min_psi, psi.nodal[d]);
    double s = norm(psi.space->dof_point(d));
    if (s > 0.1)  // away from the kink the disk trial function is |x|/R
      CHECK(psi.nodal[d] == doctest::Approx(s).epsilon(5e-3));
  }
  CHECK(min_psi < 0.03);

  ScalarField psi_field{psi.mesh, psi.space, psi.nodal};
  double bound = 1.0 / std::sqrt(2 * p.mp.value);
  for (int t = 0; t < p.mesh->num_triangles(); t++)
    for (const auto& q : tri_rule_deg4) {
      Vec2 g = psi_field.gradient(t, {q.l0, q.l1, q.l2});
      CHECK(norm(g) <= bound * 1.05 + 1e-12);
    }
}

TEST_CASE("functionals stabilize under mesh refinement") {
  auto spec = DomainSpec::ellipse(2.0, 1.0);
  std::vector<double> F, G, maxv, det;
  for (double h : {0.12, 0.06, 0.03}) {
    auto p = run(spec, h, RGrid{0.04, 0.99, 120});
    F.push_back(p.prof.F_value);
    G.push_back(p.prof.G_value);
    maxv.push_back(p.mp.value);
    det.push_back(p.mp.hessian_det);
  }
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  CHECK(rel(F[1], F[2]) < 0.005);
  CHECK(rel(G[1], G[2]) < 0.005);
  CHECK(rel(maxv[1], maxv[2]) < 0.005);
  CHECK(rel(det[1], det[2]) < 0.005);
}

TEST_CASE("open contours raise a level-set error") {
  // a saddle field on the disk: its level curves end on the boundary, so the
  // closure test must reject them
  auto mesh = std::make_shared<const TriMesh>(triangulate(DomainSpec::disk(1.0), 0.1));
  auto space = std::make_shared<const P2Space>(*mesh);
  ScalarField saddle{mesh, space, {}};
  saddle.nodal.resize(space->num_dofs());
  for (int d = 0; d < space->num_dofs(); d++) {
    Vec2 p = space->dof_point(d);
    saddle.nodal[d] = p.x * p.y;
  }
  MaxPoint fake;
  fake.location = {0, 0};
  fake.value = 0.25;
  fake.hxx = fake.hyy = -0.5;
  fake.hessian_det = 0.25;
  fake.hessian_trace = -1.0;
  CHECK_THROWS_AS(level_profile(saddle, fake, RGrid{0.3, 0.7, 9}), LevelSetError);
}

TEST_CASE("degenerate r grids are rejected") {
  auto p = run(DomainSpec::disk(1.0), 0.2, RGrid{0.1, 0.9, 16});
  CHECK_THROWS_AS(level_profile(p.v, p.mp, RGrid{0.0, 0.9, 10}), ArgumentError);
  CHECK_THROWS_AS(level_profile(p.v, p.mp, RGrid{0.1, 1.0, 10}), ArgumentError);
  CHECK_THROWS_AS(level_profile(p.v, p.mp, RGrid{0.5, 0.2, 10}), ArgumentError);
}
