#include <doctest.h>

#include <cmath>

#include "magbound/io.hpp"
#include "magbound/pipeline.hpp"

using namespace magbound;

TEST_CASE("disk bound collapses to the sharp case") {
  auto spec = DomainSpec::disk(1.0);
  auto p = run_torsion_pipeline(spec, 0.05, RGrid{0.05, 0.99, 120});
  BoundOptions opt;
  opt.radial_n = 2048;
  auto rep = assemble_bound(spec, 0.5, p.v, p.mp, p.prof, opt);

  CHECK(rep.admissible);
  CHECK(rep.C_factor == doctest::Approx(1.0).epsilon(0.01));
  CHECK(rep.rho == doctest::Approx(1.0).epsilon(0.005));
  CHECK(rep.same_area_radius == doctest::Approx(1.0).epsilon(1e-12));
  double mu_b1 = disk_mu1(0.5, 1.0, 2048).mu1;
  CHECK(rep.bound_value == doctest::Approx(mu_b1).epsilon(0.02));
  CHECK(rep.rho <= rep.same_area_radius * 1.001);
  CHECK(rep.bound_value <= rep.simplified_bound * (1 + 1e-9));
  CHECK_FALSE(rep.mu_direct.has_value());
}

TEST_CASE("ellipse bound carries the closed-form constants") {
  auto spec = DomainSpec::ellipse(2.0, 1.0);
  auto p = run_torsion_pipeline(spec, 0.05, RGrid{0.05, 0.99, 120});
  BoundOptions opt;
  opt.radial_n = 2048;
  auto rep = assemble_bound(spec, 0.4, p.v, p.mp, p.prof, opt);
  CHECK(rep.admissible);  // b |Omega| = 0.8 pi < pi
  CHECK(rep.C_factor == doctest::Approx(1.0).epsilon(0.01));
  CHECK(rep.rho == doctest::Approx(2.0 * std::sqrt(2.0) / std::sqrt(5.0)).epsilon(0.005));
  CHECK(rep.bound_value <= rep.simplified_bound * (1 + 1e-9));
}

TEST_CASE("inadmissible intensities are flagged, not rejected") {
  auto spec = DomainSpec::disk(1.0);
  auto p = run_torsion_pipeline(spec, 0.1, RGrid{0.05, 0.99, 60});
  BoundOptions opt;
  opt.radial_n = 1024;
  auto rep = assemble_bound(spec, 1.1, p.v, p.mp, p.prof, opt);
  CHECK_FALSE(rep.admissible);
  CHECK(rep.bound_value > 0);
  auto j = report_to_json(rep);
  CHECK(j["guarantee"] == "NOT-GUARANTEED");
  CHECK_THROWS_AS(assemble_bound(spec, 0.0, p.v, p.mp, p.prof, opt), ArgumentError);

  // admissibility is the strict inequality b |Omega| < pi
  auto at_edge = assemble_bound(spec, 1.0, p.v, p.mp, p.prof, opt);
  CHECK_FALSE(at_edge.admissible);
  auto below = assemble_bound(spec, 1.0 - 1e-9, p.v, p.mp, p.prof, opt);
  CHECK(below.admissible);
}

TEST_CASE("direct solve joins the report and respects the bound") {
  auto spec = DomainSpec::disk(1.0);
  auto p = run_torsion_pipeline(spec, 0.07, RGrid{0.05, 0.99, 80});
  BoundOptions opt;
  opt.radial_n = 2048;
  opt.with_direct = true;
  auto rep = assemble_bound(spec, 0.5, p.v, p.mp, p.prof, opt);
  REQUIRE(rep.mu_direct.has_value());
  double mu_b1 = disk_mu1(0.5, 1.0, 2048).mu1;
  CHECK(*rep.mu_direct == doctest::Approx(mu_b1).epsilon(0.02));
  CHECK(*rep.mu_direct <= rep.bound_value * (1 + kCrossTol));
  REQUIRE(rep.conjecture_margin.has_value());
  CHECK(std::abs(*rep.conjecture_margin) < 0.02 * mu_b1);

  auto margins = conjecture_compare(rep);
  CHECK(margins.mu_disk_R == rep.mu_disk_R);
  CHECK(margins.conjecture_margin == *rep.conjecture_margin);
}

TEST_CASE("closed-form ellipse path") {
  auto rep = ellipse_closed_form(2.0, 1.0, 0.4, 2048);
  CHECK(rep.admissible);
  CHECK(rep.C_factor == 1.0);
  CHECK(rep.max_v == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(rep.F == doctest::Approx(5 * pi).epsilon(1e-14));
  CHECK(rep.G == doctest::Approx(2 * pi).epsilon(1e-14));
  CHECK(rep.rho == doctest::Approx(1.2649110640673518).epsilon(1e-14));
  CHECK(rep.same_area_radius == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(rep.mu_disk_rho < rep.mu_disk_R);

  auto round = ellipse_closed_form(1.0, 1.0, 0.5, 1024);
  CHECK(round.rho == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(round.mu_disk_rho == round.mu_disk_R);

  auto strong = ellipse_closed_form(1.2, 1.0 / 1.2, 0.9, 2048);
  CHECK(strong.admissible);  // b alpha beta = 0.9 < 1
  CHECK(strong.mu_disk_rho < strong.mu_disk_R - 1e-8);

  auto outside = ellipse_closed_form(2.0, 1.0, 0.6, 1024);
  CHECK_FALSE(outside.admissible);  // b alpha beta = 1.2 >= 1
}

TEST_CASE("scaling route and closed-form route agree") {
  CHECK(ellipse_scaling_crosscheck(2.0, 1.0, 0.4, 2048) < 1e-6);
  CHECK(ellipse_scaling_crosscheck(3.0, 0.5, 0.1, 2048) < 1e-6);
  CHECK(ellipse_scaling_crosscheck(1.5, 1.5, 0.3, 1024) == 0.0);
}

TEST_CASE("conjecture margins on the area-pi ellipse") {
  auto spec = DomainSpec::ellipse(1.2, 1.0 / 1.2);
  auto p = run_torsion_pipeline(spec, 0.06, RGrid{0.05, 0.99, 100});
  BoundOptions opt;
  opt.radial_n = 2048;
  opt.with_direct = true;
  auto rep = assemble_bound(spec, 0.5, p.v, p.mp, p.prof, opt);
  auto margins = conjecture_compare(rep);
  CHECK(margins.conjecture_margin > 0);  // proved for ellipses in this regime
  // the torsion bound is at least as strong as the same-area-disk value here
  CHECK(rep.bound_value <= rep.mu_disk_R * 1.01);

  BoundReport no_direct = rep;
  no_direct.mu_direct.reset();
  CHECK_THROWS_AS(conjecture_compare(no_direct), ArgumentError);
}

TEST_CASE("rho reaches the same-area radius only on the disk") {
  for (const auto& nd : builtin_domains()) {
    auto p = run_torsion_pipeline(nd.spec, 0.05, RGrid{0.05, 0.99, 60});
    double ratio = 2 * std::sqrt(p.mp.value) / std::sqrt(area(nd.spec) / pi);
    CHECK(ratio <= 1.001);
    if (nd.spec.kind == DomainKind::Disk)
      CHECK(ratio >= 0.99);
    else
      CHECK(ratio < 0.99);
  }
}

TEST_CASE("validation table smoke run") {
  auto checks = validate_builtin(0.05, RGrid{0.02, 0.995, 150}, 1024, false);
  CHECK(checks.size() > 40);
  int failed = 0;
  for (const auto& c : checks)
    if (!c.pass) {
      failed++;
      MESSAGE(c.domain, " / ", c.property, ": measured ", c.measured, " threshold ",
              c.threshold);
    }
  CHECK(failed == 0);
}
