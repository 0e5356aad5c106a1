#pragma once

// Quadratic (6-node) scalar finite element space on a TriMesh: dof layout,
// field evaluation, and assembly of stiffness/mass/load with Eigen sparse
// backends.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <map>
#include <memory>
#include <vector>

#include "magbound/error.hpp"
#include "magbound/mesh.hpp"
#include "magbound/quadrature.hpp"
#include "magbound/vec2.hpp"

namespace magbound {

class P2Space {
 public:
  explicit P2Space(const TriMesh& mesh) : mesh_(&mesh) {
    const int nv = mesh.num_vertices();
    std::map<std::pair<int, int>, int> edge_id;
    element_dofs_.resize(mesh.num_triangles());
    auto edge_key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
    for (int t = 0; t < mesh.num_triangles(); t++) {
      const auto& tr = mesh.triangles[t];
      for (int k = 0; k < 3; k++) element_dofs_[t][k] = tr[k];
      const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
      for (int k = 0; k < 3; k++) {
        auto key = edge_key(tr[pairs[k][0]], tr[pairs[k][1]]);
        auto [it, fresh] = edge_id.try_emplace(key, nv + (int)edge_id.size());
        element_dofs_[t][3 + k] = it->second;
      }
    }
    num_dofs_ = nv + (int)edge_id.size();
    dof_points_.resize(num_dofs_);
    for (int v = 0; v < nv; v++) dof_points_[v] = mesh.vertices[v];
    for (auto& [key, id] : edge_id)
      dof_points_[id] = (mesh.vertices[key.first] + mesh.vertices[key.second]) * 0.5;

    dof_on_boundary_.assign(num_dofs_, 0);
    for (const auto& be : mesh.boundary_edges) {
      dof_on_boundary_[be.v0] = 1;
      dof_on_boundary_[be.v1] = 1;
      auto it = edge_id.find(edge_key(be.v0, be.v1));
      if (it == edge_id.end()) throw InternalError("boundary edge missing from edge table");
      dof_on_boundary_[it->second] = 1;
    }
  }

  const TriMesh& mesh() const { return *mesh_; }
  int num_dofs() const { return num_dofs_; }
  const std::array<int, 6>& element_dofs(int t) const { return element_dofs_[t]; }
  const Vec2& dof_point(int d) const { return dof_points_[d]; }
  bool on_boundary(int d) const { return dof_on_boundary_[d] != 0; }

  // constant gradients of the barycentric coordinates on triangle t
  std::array<Vec2, 3> lambda_gradients(int t) const {
    const auto& tr = mesh_->triangles[t];
    Vec2 a = mesh_->vertices[tr[0]], b = mesh_->vertices[tr[1]], c = mesh_->vertices[tr[2]];
    double twoA = cross(b - a, c - a);
    return {perp(c - b) / twoA, perp(a - c) / twoA, perp(b - a) / twoA};
  }

 private:
  const TriMesh* mesh_;
  std::vector<std::array<int, 6>> element_dofs_;
  std::vector<Vec2> dof_points_;
  std::vector<char> dof_on_boundary_;
  int num_dofs_ = 0;
};

// Scalar field in the quadratic element space. Boundary nodal values are
// exactly zero for Dirichlet fields (torsion); general fields are free.
struct ScalarField {
  std::shared_ptr<const TriMesh> mesh;
  std::shared_ptr<const P2Space> space;
  std::vector<double> nodal;  // one value per dof, units length^2 for torsion

  double value(int t, const std::array<double, 3>& l) const {
    auto N = P2Basis::shape(l[0], l[1], l[2]);
    const auto& dofs = space->element_dofs(t);
    double v = 0;
    for (int k = 0; k < 6; k++) v += nodal[dofs[k]] * N[k];
    return v;
  }

  Vec2 gradient(int t, const std::array<double, 3>& l) const {
    auto dN = P2Basis::shape_dlambda(l[0], l[1], l[2]);
    auto gl = space->lambda_gradients(t);
    const auto& dofs = space->element_dofs(t);
    Vec2 g{0, 0};
    for (int k = 0; k < 6; k++)
      for (int i = 0; i < 3; i++) g += nodal[dofs[k]] * dN[k][i] * gl[i];
    return g;
  }

  // value at an arbitrary point (walk locate); throws if outside the mesh
  double value_at(const Vec2& p, int* hint = nullptr) const {
    int t = mesh->locate(p, hint ? *hint : 0);
    if (t < 0) throw ArgumentError("point outside the mesh");
    if (hint) *hint = t;
    return value(t, mesh->barycentric(t, p));
  }
};

// stiffness int grad u . grad v (exact: degree-2 integrand over affine elements)
inline Eigen::SparseMatrix<double> assemble_stiffness(const P2Space& space) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(space.mesh().num_triangles() * 36);
  for (int t = 0; t < space.mesh().num_triangles(); t++) {
    double A = space.mesh().triangle_area(t);
    auto gl = space.lambda_gradients(t);
    const auto& dofs = space.element_dofs(t);
    std::array<std::array<double, 6>, 6> ke{};
    for (const auto& q : tri_rule_deg2) {
      auto dN = P2Basis::shape_dlambda(q.l0, q.l1, q.l2);
      std::array<Vec2, 6> g;
      for (int k = 0; k < 6; k++) {
        g[k] = {0, 0};
        for (int i = 0; i < 3; i++) g[k] += dN[k][i] * gl[i];
      }
      for (int a = 0; a < 6; a++)
        for (int b = 0; b < 6; b++) ke[a][b] += q.w * A * dot(g[a], g[b]);
    }
    for (int a = 0; a < 6; a++)
      for (int b = 0; b < 6; b++) trips.emplace_back(dofs[a], dofs[b], ke[a][b]);
  }
  Eigen::SparseMatrix<double> K(space.num_dofs(), space.num_dofs());
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

// load vector int f N_i for constant f
inline Eigen::VectorXd assemble_constant_load(const P2Space& space, double f) {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.num_dofs());
  for (int t = 0; t < space.mesh().num_triangles(); t++) {
    double A = space.mesh().triangle_area(t);
    const auto& dofs = space.element_dofs(t);
    for (const auto& q : tri_rule_deg4) {
      auto N = P2Basis::shape(q.l0, q.l1, q.l2);
      for (int a = 0; a < 6; a++) rhs[dofs[a]] += q.w * A * f * N[a];
    }
  }
  return rhs;
}

}  // namespace magbound
