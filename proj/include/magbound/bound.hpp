#pragma once

// Assembly of the torsion-based upper bound C(Omega) mu_1^b(B_rho) on the
// lowest magnetic Neumann eigenvalue, with C = G/(F max v) and
// rho = 2 sqrt(max v), the simplified same-area-disk variant, the closed-form
// ellipse path, the scaling cross-check, and the comparison against the
// same-area-disk conjecture.

#include <cmath>
#include <optional>
#include <string>

#include "magbound/disk_spectrum.hpp"
#include "magbound/geometry.hpp"
#include "magbound/level_set.hpp"
#include "magbound/magnetic.hpp"
#include "magbound/torsion.hpp"

namespace magbound {

// default relative tolerance for cross-solver inequalities
inline constexpr double kCrossTol = 0.02;

struct BoundReport {
  DomainSpec domain;
  double b = 0;
  bool admissible = false;  // b |Omega| < pi; when false the bound carries no guarantee
  double area_value = 0;    // analytic |Omega|
  double max_v = 0;
  double F = 0;
  double G = 0;
  double C_factor = 0;          // G / (F max v)
  double rho = 0;               // 2 sqrt(max v)
  double same_area_radius = 0;  // sqrt(|Omega| / pi)
  double mu_disk_rho = 0;       // mu_1^b(B_rho)
  double mu_disk_R = 0;         // mu_1^b(B_R)
  double bound_value = 0;       // C * mu_disk_rho
  double simplified_bound = 0;  // C * mu_disk_R
  std::optional<double> mu_direct;
  std::optional<double> conjecture_margin;  // mu_disk_R - mu_direct
  // provenance
  double mesh_h = 0;
  int r_grid_n = 0;
  double r_grid_min = 0, r_grid_max = 0;
  int radial_n = 0;
  bool closed_form = false;
};

struct BoundOptions {
  int radial_n = 4096;
  bool with_direct = false;
  GaugeKind direct_gauge = GaugeKind::ScalarPotential;
  EigenResult* direct_out = nullptr;  // receives the eigenpair when set
};

inline BoundReport assemble_bound(const DomainSpec& spec, double b, const ScalarField& torsion,
                                  const MaxPoint& mp, const LevelProfile& prof,
                                  const BoundOptions& opt = {}) {
  if (!(b > 0)) throw ArgumentError("bound assembly needs b > 0");
  if (!torsion.mesh || torsion.nodal.empty())
    throw ArgumentError("bound assembly needs a solved torsion field");

  BoundReport rep;
  rep.domain = spec;
  rep.b = b;
  rep.area_value = area(spec);
  rep.admissible = b * rep.area_value < pi;
  rep.max_v = mp.value;
  rep.F = prof.F_value;
  rep.G = prof.G_value;
  rep.C_factor = rep.G / (rep.F * rep.max_v);
  rep.rho = 2.0 * std::sqrt(rep.max_v);
  rep.same_area_radius = std::sqrt(rep.area_value / pi);
  rep.mu_disk_rho = disk_mu1(b, rep.rho, opt.radial_n).mu1;
  rep.mu_disk_R = disk_mu1(b, rep.same_area_radius, opt.radial_n).mu1;
  rep.bound_value = rep.C_factor * rep.mu_disk_rho;
  rep.simplified_bound = rep.C_factor * rep.mu_disk_R;
  rep.mesh_h = torsion.mesh->target_h;
  rep.r_grid_n = static_cast<int>(prof.r_grid.size());
  rep.r_grid_min = prof.r_grid.empty() ? 0 : prof.r_grid.front();
  rep.r_grid_max = prof.r_grid.empty() ? 0 : prof.r_grid.back();
  rep.radial_n = opt.radial_n;

  if (opt.with_direct) {
    GaugeField gauge =
        build_gauge(spec, *torsion.mesh, b, opt.direct_gauge,
                    opt.direct_gauge == GaugeKind::ScalarPotential ? &torsion : nullptr);
    EigenResult direct = solve_mu1(torsion.space, gauge);
    rep.mu_direct = direct.mu1;
    rep.conjecture_margin = rep.mu_disk_R - *rep.mu_direct;
    if (opt.direct_out) *opt.direct_out = std::move(direct);
  }
  return rep;
}

// Analytic path for the ellipse with semi-axes alpha, beta: no finite
// elements involved; max v = 1/gamma, F = pi gamma alpha beta,
// G = pi alpha beta, C = 1, rho = 2/sqrt(gamma).
inline BoundReport ellipse_closed_form(double alpha, double beta, double b,
                                       int radial_n = 4096) {
  if (!(alpha > 0) || !(beta > 0)) throw ArgumentError("semi-axes must be positive");
  if (!(b > 0)) throw ArgumentError("closed-form path needs b > 0");
  const double gamma = 2.0 / (alpha * alpha) + 2.0 / (beta * beta);

  BoundReport rep;
  rep.domain = DomainSpec::ellipse(alpha, beta);
  rep.b = b;
  rep.closed_form = true;
  rep.area_value = pi * alpha * beta;
  rep.admissible = b * alpha * beta < 1.0;  // equivalent to b |Omega| < pi
  rep.max_v = 1.0 / gamma;
  rep.F = pi * gamma * alpha * beta;
  rep.G = pi * alpha * beta;
  rep.C_factor = 1.0;
  rep.rho = 2.0 / std::sqrt(gamma);
  rep.same_area_radius = std::sqrt(alpha * beta);
  rep.mu_disk_rho = disk_mu1(b, rep.rho, radial_n).mu1;
  rep.mu_disk_R = disk_mu1(b, rep.same_area_radius, radial_n).mu1;
  rep.bound_value = rep.mu_disk_rho;
  rep.simplified_bound = rep.mu_disk_R;
  rep.radial_n = radial_n;

  if (alpha != beta && rep.admissible) {
    // rho < sqrt(alpha beta) and the radial monotonicity force a strict gap
    if (!(rep.mu_disk_rho < rep.mu_disk_R - 1e-9 * rep.mu_disk_R))
      throw InternalError("disk monotonicity violated along the ellipse path");
  }
  return rep;
}

// The same ellipse bound through the anisotropic-scaling route; returns the
// relative discrepancy of the two paths (identically zero in exact
// arithmetic).
inline double ellipse_scaling_crosscheck(double alpha, double beta, double b,
                                         int radial_n = 4096) {
  if (!(alpha > 0) || !(beta > 0) || !(b > 0))
    throw ArgumentError("scaling cross-check needs positive semi-axes and b");
  const double gamma = 2.0 / (alpha * alpha) + 2.0 / (beta * beta);
  const double s = alpha * alpha + beta * beta;
  const double b_hat = 2.0 * alpha * beta * b / s;
  double path_scaled = s / (2.0 * alpha * beta) *
                       disk_mu1(b_hat, std::sqrt(alpha * beta), radial_n).mu1;
  double path_direct = disk_mu1(b, 2.0 / std::sqrt(gamma), radial_n).mu1;
  return std::abs(path_scaled - path_direct) / path_direct;
}

// Margins against the same-area-disk comparison. The conjecture margin is
// reported, never asserted; the bound slack says whether the torsion bound
// is stronger or weaker than the conjectured inequality.
struct MarginReport {
  double mu_disk_R = 0;
  double conjecture_margin = 0;  // mu_1^b(B_R) - mu_1^b(Omega), >= 0 expected
  double bound_slack = 0;        // bound_value - mu_1^b(B_R), > 0 means weaker
};

inline MarginReport conjecture_compare(const BoundReport& rep) {
  if (!rep.mu_direct)
    throw ArgumentError("conjecture comparison needs the direct eigenvalue");
  MarginReport m;
  m.mu_disk_R = rep.mu_disk_R;
  m.conjecture_margin = rep.mu_disk_R - *rep.mu_direct;
  m.bound_slack = rep.bound_value - rep.mu_disk_R;
  return m;
}

}  // namespace magbound
