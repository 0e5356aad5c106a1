#pragma once

// Orchestration shared by the command-line tool and the test suites: the
// mesh-torsion-profile pipeline, the builtin domain set, and the property
// validation table.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "magbound/bound.hpp"
#include "magbound/delaunay.hpp"
#include "magbound/disk_spectrum.hpp"
#include "magbound/level_set.hpp"
#include "magbound/magnetic.hpp"
#include "magbound/torsion.hpp"

namespace magbound {

struct TorsionPipeline {
  std::shared_ptr<const TriMesh> mesh;
  ScalarField v;
  MaxPoint mp;
  LevelProfile prof;
};

inline TorsionPipeline run_torsion_pipeline(const DomainSpec& spec, double mesh_h,
                                            const RGrid& grid = {}) {
  TorsionPipeline p;
  p.mesh = std::make_shared<const TriMesh>(triangulate(spec, mesh_h));
  p.v = solve_torsion(p.mesh);
  p.mp = locate_max(p.v);
  p.prof = level_profile(p.v, p.mp, grid);
  return p;
}

struct NamedDomain {
  std::string name;
  DomainSpec spec;
};

inline std::vector<NamedDomain> builtin_domains() {
  return {
      {"disk", DomainSpec::disk(1.0)},
      {"ellipse_2_1", DomainSpec::ellipse(2.0, 1.0)},
      {"ellipse_round", DomainSpec::ellipse(1.2, 1.0 / 1.2)},
      {"superellipse", DomainSpec::superellipse(4, 1.0)},
  };
}

struct ValidationCheck {
  std::string domain;
  std::string property;
  double measured = 0;
  double threshold = 0;
  bool larger_is_worse = true;  // pass iff measured <= threshold (or >= when false)
  bool pass = false;
};

namespace detail {
inline void push_check(std::vector<ValidationCheck>& out, const std::string& domain,
                       const std::string& property, double measured, double threshold,
                       bool larger_is_worse = true) {
  ValidationCheck c{domain, property, measured, threshold, larger_is_worse, false};
  c.pass = larger_is_worse ? measured <= threshold : measured >= threshold;
  out.push_back(c);
}
}  // namespace detail

// Property suite over the builtin domains at the given resolutions. The
// direct eigensolver checks run only when with_direct is set.
inline std::vector<ValidationCheck> validate_builtin(double mesh_h, const RGrid& grid,
                                                     int radial_n, bool with_direct,
                                                     const std::function<void(const std::string&)>&
                                                         progress = nullptr) {
  using detail::push_check;
  std::vector<ValidationCheck> out;

  for (const auto& nd : builtin_domains()) {
    if (progress) progress("pipeline: " + nd.name);
    auto p = run_torsion_pipeline(nd.spec, mesh_h, grid);
    double exact_area = area(nd.spec);
    double R2 = exact_area / pi;
    double det = p.mp.hessian_det;

    push_check(out, nd.name, "mesh min angle [deg]", p.mesh->min_angle_deg(), 25.0, false);
    push_check(out, nd.name, "mesh area rel error", std::abs(p.mesh->total_area() - exact_area) / exact_area, 1e-3);

    double grad_ratio = 0, dist_ratio = 0;
    for (int t = 0; t < p.mesh->num_triangles(); t++)
      for (const auto& q : tri_rule_deg4) {
        std::array<double, 3> l{q.l0, q.l1, q.l2};
        double val = p.v.value(t, l);
        double gap = std::max(p.mp.value - val, 1e-300);
        grad_ratio = std::max(grad_ratio, norm2(p.v.gradient(t, l)) / (2 * gap));
      }
    for (int d = 0; d < p.v.space->num_dofs(); d++) {
      double gap = p.mp.value - p.v.nodal[d];
      double rr = norm2(p.v.space->dof_point(d) - p.mp.location);
      if (rr > 1e-12) dist_ratio = std::max(dist_ratio, gap / (0.5 * rr));
    }
    push_check(out, nd.name, "gradient bound ratio", grad_ratio, 1.02);
    push_check(out, nd.name, "distance bound ratio", dist_ratio, 1.02);
    push_check(out, nd.name, "Talenti max v / (R^2/4)", p.mp.value / (R2 / 4), 1.001);
    push_check(out, nd.name, "Hessian trace", std::abs(p.mp.hessian_trace + 1.0), 0.02);
    push_check(out, nd.name, "Hessian det", det, 0.25 * 1.02);

    double lo = 1e300, hi = 0;
    for (size_t i = 0; i < p.prof.r_grid.size(); i++) {
      double ratio = p.prof.level_length[i] / p.prof.r_grid[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    push_check(out, nd.name, "|A_r|/r spread", hi / lo, 10.0);

    double min_invgrad = 1e300;
    for (double f : p.prof.inv_grad_integral) min_invgrad = std::min(min_invgrad, f);
    push_check(out, nd.name, "per-level co-area integral / 4pi", min_invgrad / (4 * pi), 0.99,
               false);

    push_check(out, nd.name, "F / 4pi", p.prof.F_value / (4 * pi), 0.99, false);
    push_check(out, nd.name, "F sqrt(det)/2pi", p.prof.F_value * std::sqrt(det) / (2 * pi),
               1.01);
    push_check(out, nd.name, "G / max(2 pi max_v/sqrt(det), |Omega|)",
               p.prof.G_value /
                   std::max(2 * pi * p.mp.value / std::sqrt(det), exact_area),
               0.99, false);
    double C = p.prof.G_value / (p.prof.F_value * p.mp.value);
    push_check(out, nd.name, "C factor", C, 0.99, false);

    auto alt = level_profile_via_areas(p.prof, p.mp);
    push_check(out, nd.name, "F cross-method gap", alt.f_rel_gap, 0.01);
    push_check(out, nd.name, "G cross-method gap", alt.g_rel_gap, 0.01);
    push_check(out, nd.name, "co-area closure rel error",
               std::abs(coarea_closure_area(p.prof) - p.prof.mesh_area) / p.prof.mesh_area,
               0.005);

    double rho = 2 * std::sqrt(p.mp.value);
    push_check(out, nd.name, "rho / R", rho / std::sqrt(R2), 1.001);

    if (nd.spec.kind == DomainKind::Disk) {
      push_check(out, nd.name, "disk C in [0.99, 1.02] (value)", C, 1.02);
      push_check(out, nd.name, "disk rho (= R)", rho / std::sqrt(R2), 0.99, false);
    }
    if (nd.spec.kind == DomainKind::Ellipse) {
      double a = nd.spec.alpha, bb = nd.spec.beta;
      double gamma = 2 / (a * a) + 2 / (bb * bb);
      push_check(out, nd.name, "ellipse F vs pi gamma a b",
                 std::abs(p.prof.F_value - pi * gamma * a * bb) / (pi * gamma * a * bb), 0.01);
      push_check(out, nd.name, "ellipse G vs pi a b",
                 std::abs(p.prof.G_value - pi * a * bb) / (pi * a * bb), 0.01);
      push_check(out, nd.name, "ellipse max v vs 1/gamma",
                 std::abs(p.mp.value - 1 / gamma) * gamma, 0.005);
      double rho_exact = std::sqrt(2.0) * a * bb / std::sqrt(a * a + bb * bb);
      push_check(out, nd.name, "ellipse rho vs closed form",
                 std::abs(rho - rho_exact) / rho_exact, 0.005);
    }
    if (nd.spec.kind == DomainKind::Superellipse) {
      push_check(out, nd.name, "superellipse det vs 1/4", std::abs(det - 0.25) / 0.25, 0.02);
      push_check(out, nd.name, "superellipse F vs 4pi",
                 std::abs(p.prof.F_value - 4 * pi) / (4 * pi), 0.02);
      push_check(out, nd.name, "superellipse C margin", C, 1.02, false);
    }

    if (with_direct) {
      if (progress) progress("direct eigensolve: " + nd.name);
      for (double b : {0.2, 0.5, 0.8 * pi / exact_area}) {
        if (!(b * exact_area < pi)) continue;
        BoundOptions opt;
        opt.radial_n = radial_n;
        opt.with_direct = true;
        auto rep = assemble_bound(nd.spec, b, p.v, p.mp, p.prof, opt);
        push_check(out, nd.name,
                   "direct mu <= bound (b=" + std::to_string(b).substr(0, 5) + ")",
                   *rep.mu_direct / rep.bound_value, 1.0 + kCrossTol);
        push_check(out, nd.name, "bound <= simplified (b=" + std::to_string(b).substr(0, 5) + ")",
                   rep.bound_value / rep.simplified_bound, 1.0 + 1e-9);
      }
    }
  }

  if (progress) progress("disk spectrum properties");
  push_check(out, "disk_spectrum", "scaling check (0.5, 2)", scaling_check(0.5, 2.0, radial_n),
             1e-6);
  push_check(out, "disk_spectrum", "scaling check (0.8, 0.5)",
             scaling_check(0.8, 0.5, radial_n), 1e-6);
  push_check(out, "disk_spectrum", "ellipse scaling cross-check (2,1,0.4)",
             ellipse_scaling_crosscheck(2.0, 1.0, 0.4, radial_n), 1e-6);

  {
    auto mus = monotonicity_scan_R(1.0, {0.2, 0.4, 0.6, 0.8}, radial_n);
    double worst = 1e300;
    for (size_t i = 1; i < mus.size(); i++) worst = std::min(worst, mus[i] - mus[i - 1]);
    push_check(out, "disk_spectrum", "R-monotonicity min step", worst, 1e-8, false);
  }
  {
    auto us = monotonicity_scan_b(1.0, {0.05, 0.1, 0.2, 0.4}, radial_n);
    double worst = 1e300;
    for (size_t i = 1; i < us.size(); i++) worst = std::min(worst, us[i - 1] - us[i]);
    push_check(out, "disk_spectrum", "b-monotonicity min step", worst, 0.0, false);
    double u0 = (0.1 * 0.1 * us[0] - 0.05 * 0.05 * us[1]) / (0.1 * 0.1 - 0.05 * 0.05);
    push_check(out, "disk_spectrum", "u(0) vs 1/8", std::abs(u0 - 0.125) / 0.125, 0.01);
    for (size_t i = 0; i < us.size(); i++)
      push_check(out, "disk_spectrum", "u < 1/8 strict", us[i], 0.125);
  }
  for (double bR2 : {0.25, 0.5, 0.9}) {
    auto spec = disk_mu1(bR2, 1.0, radial_n);
    push_check(out, "disk_spectrum",
               "minimizing mode (bR^2=" + std::to_string(bR2).substr(0, 4) + ")",
               std::abs(spec.minimizing_mode), 0.0);
  }
  return out;
}

}  // namespace magbound
