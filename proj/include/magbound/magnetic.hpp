#pragma once

// Magnetic Neumann eigenproblem on a triangulated domain: vector potentials
// in the scalar-potential and symmetric gauges, Hermitian assembly of the
// form int |(-i grad - A)u|^2 over complex quadratic elements, lowest
// eigenvalue by shift-invert iteration, and the level-set trial-function
// Rayleigh quotient. This is the only complex-valued module.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <memory>
#include <vector>

#include "magbound/disk_spectrum.hpp"
#include "magbound/fem.hpp"
#include "magbound/geometry.hpp"
#include "magbound/level_set.hpp"
#include "magbound/torsion.hpp"

namespace magbound {

enum class GaugeKind { ScalarPotential, Symmetric };

// Vector potential sampled at the degree-4 quadrature points of each
// element, with curl/div/boundary-flux diagnostics.
struct GaugeField {
  GaugeKind kind = GaugeKind::Symmetric;
  double b = 0;
  std::vector<std::array<Vec2, 6>> at_qpoints;  // aligned with tri_rule_deg4
  double curl_rel_l2 = 0;                       // ||curl A - b||_L2 / (b sqrt(|Omega|))
  double div_rel_l2 = 0;                        // ||div A||_L2 / (b sqrt(|Omega|))
  double max_boundary_flux = 0;                 // max |nu . A| on boundary quad points
};

inline GaugeField build_gauge(const DomainSpec& spec, const TriMesh& mesh, double b,
                              GaugeKind kind, const ScalarField* torsion = nullptr) {
  spec.validate();
  if (!(b >= 0)) throw ArgumentError("field intensity must be non-negative");
  GaugeField gauge;
  gauge.kind = kind;
  gauge.b = b;
  gauge.at_qpoints.resize(mesh.num_triangles());

  if (kind == GaugeKind::ScalarPotential) {
    if (!torsion) throw ArgumentError("scalar-potential gauge needs the torsion field");
    if (torsion->mesh.get() != &mesh)
      throw ArgumentError("torsion field was solved on a different mesh");
  }

  const P2Space* space = torsion ? torsion->space.get() : nullptr;
  double curl_l2 = 0, div_l2 = 0, interior_area = 0;
  for (int t = 0; t < mesh.num_triangles(); t++) {
    double A_area = mesh.triangle_area(t);
    bool interior = !mesh.is_boundary_vertex[mesh.triangles[t][0]] &&
                    !mesh.is_boundary_vertex[mesh.triangles[t][1]] &&
                    !mesh.is_boundary_vertex[mesh.triangles[t][2]];
    if (interior) interior_area += A_area;
    for (int q = 0; q < 6; q++) {
      const auto& qp = tri_rule_deg4[q];
      Vec2 p = mesh.vertices[mesh.triangles[t][0]] * qp.l0 +
               mesh.vertices[mesh.triangles[t][1]] * qp.l1 +
               mesh.vertices[mesh.triangles[t][2]] * qp.l2;
      if (kind == GaugeKind::Symmetric) {
        gauge.at_qpoints[t][q] = Vec2{-p.y, p.x} * (0.5 * b);
      } else {
        Vec2 g = torsion->gradient(t, {qp.l0, qp.l1, qp.l2});
        gauge.at_qpoints[t][q] = Vec2{g.y, -g.x} * b;  // (-d2 phi, d1 phi), phi = -b v
      }
    }
    if (kind == GaugeKind::Symmetric || !interior) continue;
    // element Hessian of the quadratic torsion interpolant is constant;
    // second derivatives of the Galerkin solution carry O(1) error on the
    // boundary band, so the curl/div residuals are measured on interior
    // elements, matching the interior statement they certify
    auto gl = space->lambda_gradients(t);
    const auto& dofs = space->element_dofs(t);
    double hxx = 0, hyy = 0;  // curl A - b = -b (lap v + 1); div A = 0 identically
    auto add = [&](double coeff, const Vec2& ga, const Vec2& gb) {
      hxx += coeff * ga.x * gb.x;
      hyy += coeff * ga.y * gb.y;
    };
    const double n0 = torsion->nodal[dofs[0]], n1 = torsion->nodal[dofs[1]],
                 n2 = torsion->nodal[dofs[2]], n3 = torsion->nodal[dofs[3]],
                 n4 = torsion->nodal[dofs[4]], n5 = torsion->nodal[dofs[5]];
    add(4 * n0, gl[0], gl[0]);
    add(4 * n1, gl[1], gl[1]);
    add(4 * n2, gl[2], gl[2]);
    add(8 * n3, gl[0], gl[1]);
    add(8 * n4, gl[1], gl[2]);
    add(8 * n5, gl[2], gl[0]);
    double curl_dev = -b * (hxx + hyy) - b;
    curl_l2 += curl_dev * curl_dev * A_area;
  }
  if (b > 0 && interior_area > 0) {
    gauge.curl_rel_l2 = std::sqrt(curl_l2) / (b * std::sqrt(interior_area));
    gauge.div_rel_l2 = std::sqrt(div_l2) / (b * std::sqrt(interior_area));
  }

  if (kind == GaugeKind::ScalarPotential) {
    // nu . A = -b (tangential derivative of v); the trace vanishes on each
    // boundary edge, so this measures round-off only
    std::map<std::pair<int, int>, std::pair<int, int>> tri_of_edge;
    for (int t = 0; t < mesh.num_triangles(); t++)
      for (int k = 0; k < 3; k++)
        tri_of_edge[{mesh.triangles[t][k], mesh.triangles[t][(k + 1) % 3]}] = {t, k};
    for (const auto& be : mesh.boundary_edges) {
      auto it = tri_of_edge.find({be.v0, be.v1});
      if (it == tri_of_edge.end()) continue;
      int t = it->second.first;
      Vec2 a = mesh.vertices[be.v0], bpt = mesh.vertices[be.v1];
      for (const auto& [s, w] : seg_rule_3) {
        (void)w;
        Vec2 p = a + (bpt - a) * s;
        auto l = mesh.barycentric(t, p);
        Vec2 g = torsion->gradient(t, l);
        Vec2 Aq = Vec2{g.y, -g.x} * b;
        gauge.max_boundary_flux = std::max(gauge.max_boundary_flux,
                                           std::abs(dot(be.normal, Aq)));
      }
    }
  }
  return gauge;
}

struct EigenResult {
  double mu1 = 0;
  std::vector<std::complex<double>> eigenvector;  // unit L2 norm, fixed phase
  double residual = 0;                            // ||K x - mu M x|| / ||K x||
  double mesh_h = 0;
};

namespace detail {

using cd = std::complex<double>;

// K entries: grad phi_j . grad phi_k + |A|^2 phi_j phi_k
//            + i (phi_j A . grad phi_k - phi_k A . grad phi_j)
inline void assemble_magnetic(const P2Space& space, const GaugeField& gauge,
                              Eigen::SparseMatrix<cd>& K, Eigen::SparseMatrix<cd>& M) {
  const TriMesh& mesh = space.mesh();
  std::vector<Eigen::Triplet<cd>> kt, mt;
  kt.reserve(mesh.num_triangles() * 36);
  mt.reserve(mesh.num_triangles() * 36);
  for (int t = 0; t < mesh.num_triangles(); t++) {
    double A_area = mesh.triangle_area(t);
    auto gl = space.lambda_gradients(t);
    const auto& dofs = space.element_dofs(t);
    std::array<std::array<cd, 6>, 6> ke{};
    std::array<std::array<double, 6>, 6> me{};
    for (int q = 0; q < 6; q++) {
      const auto& qp = tri_rule_deg4[q];
      double w = qp.w * A_area;
      auto N = P2Basis::shape(qp.l0, qp.l1, qp.l2);
      auto dN = P2Basis::shape_dlambda(qp.l0, qp.l1, qp.l2);
      std::array<Vec2, 6> g;
      for (int k = 0; k < 6; k++) {
        g[k] = {0, 0};
        for (int i = 0; i < 3; i++) g[k] += dN[k][i] * gl[i];
      }
      Vec2 Aq = gauge.at_qpoints[t][q];
      double A2 = norm2(Aq);
      for (int a = 0; a < 6; a++) {
        for (int b2 = a; b2 < 6; b2++) {
          double re = dot(g[a], g[b2]) + A2 * N[a] * N[b2];
          double im = N[a] * dot(Aq, g[b2]) - N[b2] * dot(Aq, g[a]);
          ke[a][b2] += cd(w * re, w * im);
          me[a][b2] += w * N[a] * N[b2];
        }
      }
    }
    for (int a = 0; a < 6; a++)
      for (int b2 = a; b2 < 6; b2++) {
        kt.emplace_back(dofs[a], dofs[b2], ke[a][b2]);
        mt.emplace_back(dofs[a], dofs[b2], cd(me[a][b2], 0.0));
        if (a != b2) {
          kt.emplace_back(dofs[b2], dofs[a], std::conj(ke[a][b2]));
          mt.emplace_back(dofs[b2], dofs[a], cd(me[a][b2], 0.0));
        }
      }
  }
  K.resize(space.num_dofs(), space.num_dofs());
  M.resize(space.num_dofs(), space.num_dofs());
  K.setFromTriplets(kt.begin(), kt.end());
  M.setFromTriplets(mt.begin(), mt.end());
}

inline void check_hermitian(const Eigen::SparseMatrix<cd>& K) {
  Eigen::SparseMatrix<cd> Kh = K.adjoint();
  Eigen::SparseMatrix<cd> D = K - Kh;
  double m = 0;
  for (int c = 0; c < D.outerSize(); c++)
    for (Eigen::SparseMatrix<cd>::InnerIterator it(D, c); it; ++it)
      m = std::max(m, std::abs(it.value()));
  if (m != 0.0) throw InternalError("magnetic assembly is not Hermitian");
}

}  // namespace detail

inline EigenResult solve_mu1(std::shared_ptr<const P2Space> space, const GaugeField& gauge) {
  using cd = detail::cd;
  const int n = space->num_dofs();
  if ((int)gauge.at_qpoints.size() != space->mesh().num_triangles())
    throw ArgumentError("gauge field was built on a different mesh");

  Eigen::SparseMatrix<cd> K, M;
  detail::assemble_magnetic(*space, gauge, K, M);
  detail::check_hermitian(K);

  EigenResult res;
  res.mesh_h = space->mesh().target_h;

  Eigen::VectorXcd x = Eigen::VectorXcd::Constant(n, cd(1.0, 0.0));
  auto m_norm = [&](const Eigen::VectorXcd& v) {
    return std::sqrt(std::real(v.dot(M * v)));
  };

  if (gauge.b == 0) {
    x /= m_norm(x);
    res.mu1 = 0.0;
    // the constant vector is the exact kernel mode; K x measures round-off
    res.residual = (K * x).norm() / (M * x).norm();
    res.eigenvector.assign(x.data(), x.data() + n);
    return res;
  }

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<cd>> solver(K);
  if (solver.info() != Eigen::Success)
    throw SolverError("magnetic stiffness factorization failed");

  x /= m_norm(x);
  cd theta_prev(-1, 0);
  for (int it = 0; it < 500; it++) {
    Eigen::VectorXcd y = solver.solve(M * x);
    cd theta = x.dot(y);  // Rayleigh quotient of the inverse operator
    double yn = m_norm(y);
    x = y / yn;
    if (it > 2 && std::abs(theta - theta_prev) <= 1e-13 * std::abs(theta)) break;
    theta_prev = theta;
    if (it == 499) throw SolverError("magnetic eigenvalue iteration did not converge");
  }

  // eigenvalue from the element-level form (positive terms, no cancellation)
  double num = 0, den = 0;
  const TriMesh& mesh = space->mesh();
  for (int t = 0; t < mesh.num_triangles(); t++) {
    double A_area = mesh.triangle_area(t);
    auto gl = space->lambda_gradients(t);
    const auto& dofs = space->element_dofs(t);
    for (int q = 0; q < 6; q++) {
      const auto& qp = tri_rule_deg4[q];
      double w = qp.w * A_area;
      auto N = P2Basis::shape(qp.l0, qp.l1, qp.l2);
      auto dN = P2Basis::shape_dlambda(qp.l0, qp.l1, qp.l2);
      cd u(0, 0);
      cd ux(0, 0), uy(0, 0);
      for (int k = 0; k < 6; k++) {
        cd c = x[dofs[k]];
        u += c * N[k];
        Vec2 g{0, 0};
        for (int i = 0; i < 3; i++) g += dN[k][i] * gl[i];
        ux += c * g.x;
        uy += c * g.y;
      }
      Vec2 Aq = gauge.at_qpoints[t][q];
      // (-i grad - A) u, componentwise
      cd dx = cd(0, -1) * ux - Aq.x * u;
      cd dy = cd(0, -1) * uy - Aq.y * u;
      num += w * (std::norm(dx) + std::norm(dy));
      den += w * std::norm(u);
    }
  }
  res.mu1 = num / den;

  Eigen::VectorXcd r = K * x - cd(res.mu1, 0) * (M * x);
  res.residual = r.norm() / (K * x).norm();

  // fix the phase: largest-modulus entry becomes real positive
  int imax = 0;
  for (int i = 1; i < n; i++)
    if (std::abs(x[i]) > std::abs(x[imax])) imax = i;
  cd phase = std::abs(x[imax]) > 0 ? x[imax] / std::abs(x[imax]) : cd(1, 0);
  x /= phase;
  x /= m_norm(x);
  res.eigenvector.assign(x.data(), x.data() + n);
  return res;
}

inline EigenResult solve_mu1(const TriMesh& mesh, const GaugeField& gauge) {
  return solve_mu1(std::make_shared<const P2Space>(mesh), gauge);
}

// |mu1(scalar-potential gauge) - mu1(symmetric gauge)| / mu1(symmetric gauge)
inline double gauge_invariance_check(const DomainSpec& spec,
                                     std::shared_ptr<const TriMesh> mesh, double b) {
  ScalarField v = solve_torsion(mesh);
  GaugeField sp = build_gauge(spec, *mesh, b, GaugeKind::ScalarPotential, &v);
  GaugeField sym = build_gauge(spec, *mesh, b, GaugeKind::Symmetric);
  double mu_sp = solve_mu1(v.space, sp).mu1;
  double mu_sym = solve_mu1(v.space, sym).mu1;
  return std::abs(mu_sp - mu_sym) / mu_sym;
}

// Rayleigh quotient of u_f = f(psi(x)) in the scalar-potential gauge:
// (int |grad u|^2 + b^2 int |grad v|^2 u^2) / int u^2. Upper-bounds mu_1^b.
inline double trial_rayleigh(const ScalarField& torsion, const MaxPoint& mp, double b,
                             const RadialInterpolant& radial_f) {
  const P2Space& space = *torsion.space;
  const TriMesh& mesh = space.mesh();
  const double maxv = mp.value;
  double num = 0, den = 0;
  for (int t = 0; t < mesh.num_triangles(); t++) {
    double A_area = mesh.triangle_area(t);
    for (const auto& qp : tri_rule_deg4) {
      double w = qp.w * A_area;
      std::array<double, 3> l{qp.l0, qp.l1, qp.l2};
      double v = torsion.value(t, l);
      Vec2 gv = torsion.gradient(t, l);
      double psi = std::sqrt(std::clamp(1.0 - v / maxv, 0.0, 1.0));
      double psi_safe = std::max(psi, 1e-8);
      double u = radial_f.value(psi);
      double fp = radial_f.deriv(psi_safe);
      // grad u = f'(psi) grad psi, grad psi = -grad v / (2 max v psi)
      double gu = fp * norm(gv) / (2.0 * maxv * psi_safe);
      num += w * (gu * gu + b * b * norm2(gv) * u * u);
      den += w * u * u;
    }
  }
  if (!(den > 0)) throw ArgumentError("trial profile vanishes identically");
  return num / den;
}

}  // namespace magbound
