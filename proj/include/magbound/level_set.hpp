#pragma once

// Level-set geometry of the torsion field: contours A_r = {v = max v (1-r^2)}
// extracted from the quadratic interpolant by edge-exact root finding and a
// walk over element boundaries, superlevel areas with curved-boundary
// corrections, line integrals of 1/|grad v| and |grad v|/r^2 along the
// contours, and the domain functionals F and G built from them.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "magbound/fem.hpp"
#include "magbound/torsion.hpp"

namespace magbound {

struct RGrid {
  double r_min = 0.02;
  double r_max = 0.995;
  int n = 400;

  double at(int i) const {
    return n == 1 ? r_min : r_min + (r_max - r_min) * i / (n - 1.0);
  }
};

struct LevelProfile {
  std::vector<double> r_grid;
  std::vector<double> superlevel_area;         // |Omega_r|
  std::vector<double> level_length;            // |A_r|
  std::vector<double> inv_grad_integral;       // int_{A_r} 1/|grad v|
  std::vector<double> grad_over_r2_integral;   // int_{A_r} |grad v| / r^2
  double F_value = 0;                          // ess-inf candidate set minimum
  double G_value = 0;                          // ess-sup candidate set maximum
  double f_limit_r0 = 0;                       // 2 pi / sqrt(det H*)
  double g_limit_r0 = 0;                       // 2 pi max v / sqrt(det H*)
  double g_limit_r1 = 0;                       // mesh area (r -> 1 limit)
  double mesh_area = 0;
  double max_v = 0;
};

namespace detail {

struct ElementQuad {
  std::array<double, 6> val;  // nodal values, local P2 order
  Vec2 c0, c1, c2;            // corners
  std::array<Vec2, 3> gl;     // barycentric gradients
  double area = 0;
  double lo = 0, hi = 0;      // Bernstein control bounds
};

inline double eq_value(const ElementQuad& e, double l0, double l1, double l2) {
  auto N = P2Basis::shape(l0, l1, l2);
  double v = 0;
  for (int k = 0; k < 6; k++) v += e.val[k] * N[k];
  return v;
}

inline Vec2 eq_gradient(const ElementQuad& e, double l0, double l1, double l2) {
  auto dN = P2Basis::shape_dlambda(l0, l1, l2);
  Vec2 g{0, 0};
  for (int k = 0; k < 6; k++)
    for (int i = 0; i < 3; i++) g += e.val[k] * dN[k][i] * e.gl[i];
  return g;
}

inline std::array<double, 3> eq_bary(const ElementQuad& e, const Vec2& p) {
  double d = cross(e.c1 - e.c0, e.c2 - e.c0);
  double l0 = cross(e.c1 - p, e.c2 - p) / d;
  double l1 = cross(e.c2 - p, e.c0 - p) / d;
  return {l0, l1, 1.0 - l0 - l1};
}

inline double eq_value_at(const ElementQuad& e, const Vec2& p) {
  auto l = eq_bary(e, p);
  return eq_value(e, l[0], l[1], l[2]);
}

inline Vec2 eq_gradient_at(const ElementQuad& e, const Vec2& p) {
  auto l = eq_bary(e, p);
  return eq_gradient(e, l[0], l[1], l[2]);
}

// roots of the quadratic edge trace v(t) = level, t in (0,1); the trace is
// fixed by the values at t = 0, 1/2, 1
inline int edge_roots(double va, double vm, double vb, double level, double out[2]) {
  double c2 = 2 * va - 4 * vm + 2 * vb;
  double c1 = -3 * va + 4 * vm - vb;
  double c0 = va - level;
  int n = 0;
  const double eps = 1e-14 * (std::abs(va) + std::abs(vm) + std::abs(vb) + std::abs(level));
  if (std::abs(c2) < eps) {
    if (std::abs(c1) > eps) {
      double t = -c0 / c1;
      if (t > 0 && t < 1) out[n++] = t;
    }
    return n;
  }
  double disc = c1 * c1 - 4 * c2 * c0;
  if (disc < 0) return 0;
  double sq = std::sqrt(disc);
  double q = -0.5 * (c1 + (c1 >= 0 ? sq : -sq));
  double t1 = q / c2, t2 = (q != 0) ? c0 / q : -1;
  if (t1 > t2) std::swap(t1, t2);
  if (t1 > 0 && t1 < 1) out[n++] = t1;
  if (t2 > 0 && t2 < 1 && t2 != t1) out[n++] = t2;
  return n;
}

struct ContourAccum {
  double area = 0;
  double length = 0;
  double inv_grad = 0;             // over segments with usable gradient
  double grad_sum = 0;             // int |grad v|
  double skipped_length = 0;       // length where |grad v| under the floor
  Vec2 closure{0, 0};
  int chords = 0;
};

// project p onto {v = level} along the gradient of the element quadratic;
// steps larger than max_step signal a degenerate gradient and abort
inline Vec2 project_to_level(const ElementQuad& e, Vec2 p, double level, double max_step) {
  for (int it = 0; it < 3; it++) {
    double f = eq_value_at(e, p) - level;
    Vec2 g = eq_gradient_at(e, p);
    double g2 = norm2(g);
    if (g2 <= 0) break;
    Vec2 step = g * (f / g2);
    if (norm2(step) > max_step * max_step) return p;
    p -= step;
  }
  return p;
}

// chord from p0 to p1 (region above on the left); accumulate curved-boundary
// area corrections, arc length, and the two line integrals
inline void refine_chord(const ElementQuad& e, const Vec2& p0, const Vec2& p1, double level,
                         double grad_floor, int depth, ContourAccum& acc) {
  Vec2 mid = (p0 + p1) * 0.5;
  double chord = norm(p1 - p0);
  Vec2 m = project_to_level(e, mid, level, std::max(chord, 1e-14));
  // signed area of (p0, m, p1): positive when the arc bulges away from the
  // region (which lies left of p0 -> p1), i.e. the polygon gains area
  double signed_tri = 0.5 * cross(m - p0, p1 - p0);
  double sag = std::abs(2.0 * signed_tri / std::max(chord, 1e-300));
  if (depth < 6 && sag > 0.02 * chord && chord > 1e-14) {
    acc.area += signed_tri;  // polygon now follows p0 -> m -> p1
    refine_chord(e, p0, m, level, grad_floor, depth + 1, acc);
    refine_chord(e, m, p1, level, grad_floor, depth + 1, acc);
    return;
  }
  // leaf: parabola through (p0, m, p1); enclosed area is 2/3 of the triangle
  acc.area += (2.0 / 3.0) * signed_tri;
  Vec2 ctrl = 2.0 * m - (p0 + p1) * 0.5;
  for (const auto& [t, w] : seg_rule_3) {
    Vec2 P = (1 - t) * (1 - t) * p0 + 2 * t * (1 - t) * ctrl + t * t * p1;
    Vec2 dP = 2 * (1 - t) * (ctrl - p0) + 2 * t * (p1 - ctrl);
    double ds = w * norm(dP);
    double g = norm(eq_gradient_at(e, P));
    acc.length += ds;
    acc.grad_sum += ds * g;
    if (g >= grad_floor) {
      acc.inv_grad += ds / g;
    } else {
      acc.skipped_length += ds;
    }
  }
  acc.closure += p1 - p0;
  acc.chords++;
}

// walk the element boundary, build the superlevel polygon, emit level chords
inline void element_contour(const ElementQuad& e, double level, double grad_floor,
                            ContourAccum& acc) {
  struct Pt { Vec2 p; bool entered_from_below; };
  std::array<Vec2, 3> corner{e.c0, e.c1, e.c2};
  std::array<double, 3> cval{e.val[0], e.val[1], e.val[2]};
  const int mid_node[3] = {3, 4, 5};

  std::vector<Pt> poly;
  poly.reserve(8);
  // side state while walking CCW; below_now is the side of the stretch
  // preceding the next event, so the flag marks chords through the interior
  bool below_now = !(cval[0] >= level);
  for (int k = 0; k < 3; k++) {
    int kn = (k + 1) % 3;
    if (cval[k] >= level) {
      poly.push_back({corner[k], below_now});
      below_now = false;
    } else {
      below_now = true;  // resync in case a root collapsed onto the corner
    }
    double roots[2];
    int nr = edge_roots(cval[k], e.val[mid_node[k]], cval[kn], level, roots);
    for (int i = 0; i < nr; i++) {
      Vec2 p = corner[k] + (corner[kn] - corner[k]) * roots[i];
      poly.push_back({p, below_now});
      below_now = !below_now;
    }
  }
  if (poly.empty()) return;

  double shoelace = 0;
  for (size_t i = 0; i < poly.size(); i++) {
    const Vec2& a = poly[i].p;
    const Vec2& b = poly[(i + 1) % poly.size()].p;
    shoelace += cross(a, b);
  }
  acc.area += 0.5 * shoelace;

  for (size_t i = 0; i < poly.size(); i++) {
    size_t j = (i + 1) % poly.size();
    if (poly[j].entered_from_below)
      refine_chord(e, poly[i].p, poly[j].p, level, grad_floor, 0, acc);
  }
}

}  // namespace detail

// Contour geometry and co-area integrals over the r grid. The grid extrema
// are merged with the analytic r -> 0 candidates (controlled by the Hessian
// at the maximum) and, for G, the r -> 1 candidate |Omega|.
inline LevelProfile level_profile(const ScalarField& field, const MaxPoint& mp,
                                  const RGrid& grid = {}) {
  if (!(grid.r_min > 0) || !(grid.r_max < 1) || grid.r_min > grid.r_max || grid.n < 1)
    throw ArgumentError("r grid must lie inside (0,1)");
  const TriMesh& mesh = *field.mesh;
  const P2Space& space = *field.space;
  const double maxv = mp.value;
  const double grad_floor = 1e-8 * std::sqrt(maxv);

  // cache element data
  std::vector<detail::ElementQuad> elems(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); t++) {
    auto& e = elems[t];
    const auto& dofs = space.element_dofs(t);
    for (int k = 0; k < 6; k++) e.val[k] = field.nodal[dofs[k]];
    const auto& tr = mesh.triangles[t];
    e.c0 = mesh.vertices[tr[0]];
    e.c1 = mesh.vertices[tr[1]];
    e.c2 = mesh.vertices[tr[2]];
    e.gl = space.lambda_gradients(t);
    e.area = mesh.triangle_area(t);
    // Bernstein control values bound the quadratic on the element
    double b110 = 2 * e.val[3] - 0.5 * (e.val[0] + e.val[1]);
    double b011 = 2 * e.val[4] - 0.5 * (e.val[1] + e.val[2]);
    double b101 = 2 * e.val[5] - 0.5 * (e.val[2] + e.val[0]);
    e.lo = std::min({e.val[0], e.val[1], e.val[2], b110, b011, b101});
    e.hi = std::max({e.val[0], e.val[1], e.val[2], b110, b011, b101});
  }

  LevelProfile prof;
  prof.max_v = maxv;
  prof.mesh_area = mesh.total_area();
  prof.r_grid.resize(grid.n);
  prof.superlevel_area.resize(grid.n);
  prof.level_length.resize(grid.n);
  prof.inv_grad_integral.resize(grid.n);
  prof.grad_over_r2_integral.resize(grid.n);

  for (int i = 0; i < grid.n; i++) {
    double r = grid.at(i);
    double level = maxv * (1.0 - r * r);
    detail::ContourAccum acc;
    for (const auto& e : elems) {
      if (e.lo >= level) {
        acc.area += e.area;
        continue;
      }
      if (e.hi <= level) continue;
      detail::element_contour(e, level, grad_floor, acc);
    }

    if (acc.chords == 0) {
      // contour contained in a single element near the maximizer: fall back
      // to the fitted quadratic, whose level curve is an ellipse
      double gap = maxv - level;
      double det = mp.hessian_det;
      if (!(gap > 0) || !(det > 0) || acc.area != 0)
        throw LevelSetError("contour at r = " + std::to_string(r) + " is empty or inconsistent");
      double xi1 = 0.5 * (-mp.hessian_trace + std::sqrt(mp.hessian_trace * mp.hessian_trace -
                                                        4 * det));
      double xi2 = det / xi1;
      double a = std::sqrt(2 * gap / xi2), b = std::sqrt(2 * gap / xi1);
      acc.area = 2 * pi * gap / std::sqrt(det);
      acc.grad_sum = acc.area * std::abs(mp.hessian_trace);
      acc.inv_grad = 2 * pi / std::sqrt(det);
      double h3 = (a - b) * (a - b) / ((a + b) * (a + b));
      acc.length = pi * (a + b) * (1 + 3 * h3 / (10 + std::sqrt(4 - 3 * h3)));
      acc.closure = {0, 0};
    } else {
      if (norm(acc.closure) > 1e-6 * acc.length + 1e-12)
        throw LevelSetError("contour at r = " + std::to_string(r) + " did not close");
      if (acc.skipped_length > 0 && acc.length > acc.skipped_length) {
        // reassign degenerate-gradient length to the valid part
        acc.inv_grad *= acc.length / (acc.length - acc.skipped_length);
      }
    }

    prof.r_grid[i] = r;
    prof.superlevel_area[i] = acc.area;
    prof.level_length[i] = acc.length;
    prof.inv_grad_integral[i] = acc.inv_grad;
    prof.grad_over_r2_integral[i] = acc.grad_sum / (r * r);
  }

  prof.f_limit_r0 = 2 * pi / std::sqrt(mp.hessian_det);
  prof.g_limit_r0 = 2 * pi * maxv / std::sqrt(mp.hessian_det);
  prof.g_limit_r1 = prof.mesh_area;

  prof.F_value = prof.f_limit_r0;
  for (double f : prof.inv_grad_integral) prof.F_value = std::min(prof.F_value, f);
  prof.G_value = std::max(prof.g_limit_r0, prof.g_limit_r1);
  for (double g : prof.grad_over_r2_integral) prof.G_value = std::max(prof.G_value, g);
  return prof;
}

// Reconstructs |Omega| by integrating the co-area identity
// d|Omega_r|/dr = 2 max v r int_{A_r} 1/|grad v| over the grid, completed by
// the measured area below r_min and a linear tail on [r_max, 1).
inline double coarea_closure_area(const LevelProfile& prof) {
  const int n = static_cast<int>(prof.r_grid.size());
  if (n < 2) throw ArgumentError("closure needs at least 2 grid points");
  auto deriv = [&](int i) {
    return 2 * prof.max_v * prof.r_grid[i] * prof.inv_grad_integral[i];
  };
  double acc = prof.superlevel_area.front();
  for (int i = 0; i + 1 < n; i++)
    acc += 0.5 * (deriv(i) + deriv(i + 1)) * (prof.r_grid[i + 1] - prof.r_grid[i]);
  acc += deriv(n - 1) * (1.0 - prof.r_grid[n - 1]);
  return acc;
}

// Alternative F and G through the superlevel areas: G as sup |Omega_r|/r^2,
// F from the centered-difference derivative of |Omega_r|.
struct AltFG {
  double F_alt = 0;
  double G_alt = 0;
  double f_rel_gap = 0;  // |F_alt - F| / F
  double g_rel_gap = 0;
};

inline AltFG level_profile_via_areas(const LevelProfile& prof, const MaxPoint& mp) {
  const int n = static_cast<int>(prof.r_grid.size());
  if (n < 3) throw ArgumentError("area-route formulas need at least 3 grid points");
  AltFG alt;
  alt.G_alt = 0;
  for (int i = 0; i < n; i++)
    alt.G_alt = std::max(alt.G_alt, prof.superlevel_area[i] / (prof.r_grid[i] * prof.r_grid[i]));
  double fmin = std::numeric_limits<double>::max();
  for (int i = 1; i + 1 < n; i++) {
    double dA = (prof.superlevel_area[i + 1] - prof.superlevel_area[i - 1]) /
                (prof.r_grid[i + 1] - prof.r_grid[i - 1]);
    fmin = std::min(fmin, dA / prof.r_grid[i]);
  }
  alt.F_alt = fmin / (2 * mp.value);
  alt.f_rel_gap = std::abs(alt.F_alt - prof.F_value) / prof.F_value;
  alt.g_rel_gap = std::abs(alt.G_alt - prof.G_value) / prof.G_value;
  return alt;
}

// Trial function psi = sqrt(1 - v / max v), clamped to [0,1] against
// round-off; 1 on the boundary, 0 at the maximizer.
struct TrialField {
  std::shared_ptr<const TriMesh> mesh;
  std::shared_ptr<const P2Space> space;
  std::vector<double> nodal;
};

inline TrialField trial_field(const ScalarField& field, const MaxPoint& mp) {
  if (!(mp.value > 0)) throw ArgumentError("max point carries no positive maximum");
  TrialField psi;
  psi.mesh = field.mesh;
  psi.space = field.space;
  psi.nodal.resize(field.nodal.size());
  for (size_t d = 0; d < field.nodal.size(); d++) {
    double s = 1.0 - field.nodal[d] / mp.value;
    psi.nodal[d] = std::sqrt(std::clamp(s, 0.0, 1.0));
  }
  return psi;
}

}  // namespace magbound
