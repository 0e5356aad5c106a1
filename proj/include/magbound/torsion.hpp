#pragma once

// Torsion problem: quadratic-element Galerkin solve of -lap v = 1 with v = 0
// on the boundary, and recovery of the maximizer, maximum value, and Hessian
// at the maximum by a local quadratic least-squares fit.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <sstream>
#include <memory>
#include <vector>

#include "magbound/fem.hpp"
#include "magbound/mesh.hpp"

namespace magbound {

inline ScalarField solve_torsion(std::shared_ptr<const TriMesh> mesh) {
  auto space = std::make_shared<P2Space>(*mesh);
  const int n = space->num_dofs();

  std::vector<int> free_index(n, -1);
  int n_free = 0;
  for (int d = 0; d < n; d++)
    if (!space->on_boundary(d)) free_index[d] = n_free++;
  if (n_free == 0) throw SolverError("no interior degrees of freedom");

  Eigen::SparseMatrix<double> K = assemble_stiffness(*space);
  Eigen::VectorXd rhs = assemble_constant_load(*space, 1.0);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(K.nonZeros());
  for (int col = 0; col < K.outerSize(); col++) {
    if (free_index[col] < 0) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
      if (free_index[it.row()] < 0) continue;
      trips.emplace_back(free_index[it.row()], free_index[col], it.value());
    }
  }
  Eigen::SparseMatrix<double> Kff(n_free, n_free);
  Kff.setFromTriplets(trips.begin(), trips.end());

  Eigen::VectorXd rhs_f(n_free);
  for (int d = 0; d < n; d++)
    if (free_index[d] >= 0) rhs_f[free_index[d]] = rhs[d];

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(Kff);
  if (solver.info() != Eigen::Success)
    throw SolverError("torsion stiffness factorization failed (degenerate mesh?)");
  Eigen::VectorXd x = solver.solve(rhs_f);

  // one round of iterative refinement, then the normwise backward error
  // ||r|| / (||K|| ||x|| + ||rhs||) as the relative residual of the system
  double knorm = 0;
  for (int col = 0; col < Kff.outerSize(); col++) {
    double s = 0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(Kff, col); it; ++it)
      s += std::abs(it.value());
    knorm = std::max(knorm, s);
  }
  double residual = 0;
  for (int step = 0; step < 4; step++) {
    Eigen::VectorXd r = rhs_f - Kff * x;
    residual = r.norm() / (knorm * x.norm() + rhs_f.norm());
    if (residual < 1e-14) break;
    x += solver.solve(r);
  }
  if (!(residual < 1e-12)) {
    std::ostringstream os;
    os << "torsion solve residual " << residual << " exceeds 1e-12";
    throw SolverError(os.str());
  }

  ScalarField field;
  field.mesh = mesh;
  field.space = space;
  field.nodal.assign(n, 0.0);
  for (int d = 0; d < n; d++)
    if (free_index[d] >= 0) field.nodal[d] = x[free_index[d]];

  for (int d = 0; d < n; d++)
    if (free_index[d] >= 0 && !(field.nodal[d] > 0))
      throw InternalError("torsion field violates the maximum principle at an interior node");
  return field;
}

// Maximizer data of the torsion field. The Hessian trace is -1 up to
// discretization error; the determinant lies in (0, 1/4].
struct MaxPoint {
  Vec2 location;
  double value = 0;
  double hxx = 0, hxy = 0, hyy = 0;
  double hessian_det = 0;
  double hessian_trace = 0;
};

inline MaxPoint locate_max(const ScalarField& field) {
  const P2Space& space = *field.space;
  int best = 0;
  for (int d = 1; d < space.num_dofs(); d++)
    if (field.nodal[d] > field.nodal[best]) best = d;
  Vec2 c = space.dof_point(best);

  double radius = 3.0 * field.mesh->target_h;
  std::vector<int> picked;
  for (int attempt = 0; attempt < 16; attempt++) {
    picked.clear();
    for (int d = 0; d < space.num_dofs(); d++)
      if (norm(space.dof_point(d) - c) <= radius) picked.push_back(d);
    if (picked.size() >= 12) break;
    radius *= 1.3;
  }
  if (picked.size() < 12) throw SolverError("not enough nodes near the maximum for the fit");

  Eigen::MatrixXd A(picked.size(), 6);
  Eigen::VectorXd b(picked.size());
  for (size_t i = 0; i < picked.size(); i++) {
    Vec2 d = space.dof_point(picked[i]) - c;
    A.row(i) << 1.0, d.x, d.y, d.x * d.x, d.x * d.y, d.y * d.y;
    b[i] = field.nodal[picked[i]];
  }
  Eigen::VectorXd q = A.colPivHouseholderQr().solve(b);

  MaxPoint mp;
  mp.hxx = 2 * q[3];
  mp.hxy = q[4];
  mp.hyy = 2 * q[5];
  mp.hessian_det = mp.hxx * mp.hyy - mp.hxy * mp.hxy;
  mp.hessian_trace = mp.hxx + mp.hyy;
  if (!(mp.hxx < 0) || !(mp.hessian_det > 0))
    throw SolverError("fitted Hessian at the maximum is not negative definite; mesh too coarse");

  // stationary point of the fitted quadratic
  double det = mp.hxx * mp.hyy - mp.hxy * mp.hxy;
  double sx = -(mp.hyy * q[1] - mp.hxy * q[2]) / det;
  double sy = -(-mp.hxy * q[1] + mp.hxx * q[2]) / det;
  if (std::hypot(sx, sy) > radius)
    throw SolverError("fitted maximizer escaped the fit neighborhood; mesh too coarse");
  mp.location = c + Vec2{sx, sy};
  mp.value = q[0] + q[1] * sx + q[2] * sy + q[3] * sx * sx + q[4] * sx * sy + q[5] * sy * sy;
  return mp;
}

}  // namespace magbound
