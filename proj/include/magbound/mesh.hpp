#pragma once

// Conforming triangulation of a convex planar domain with boundary markers.

#include <array>
#include <cmath>
#include <vector>

#include "magbound/error.hpp"
#include "magbound/vec2.hpp"

namespace magbound {

struct BoundaryEdge {
  int v0 = -1, v1 = -1;  // endpoints, CCW along the boundary loop
  Vec2 normal;           // outward unit normal
};

struct TriMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW vertex triples
  std::vector<std::array<int, 3>> neighbors;  // neighbors[t][k]: across edge (k,(k+1)%3), -1 on boundary
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<char> is_boundary_vertex;
  double target_h = 0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }

  double triangle_area(int t) const {
    const auto& tri = triangles[t];
    return 0.5 * cross(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]);
  }

  double total_area() const {
    double a = 0;
    for (int t = 0; t < num_triangles(); t++) a += triangle_area(t);
    return a;
  }

  double max_edge_length() const {
    double m = 0;
    for (const auto& tri : triangles)
      for (int k = 0; k < 3; k++)
        m = std::max(m, norm(vertices[tri[(k + 1) % 3]] - vertices[tri[k]]));
    return m;
  }

  double min_angle_deg() const {
    double m = 180.0;
    for (const auto& tri : triangles) {
      for (int k = 0; k < 3; k++) {
        Vec2 a = vertices[tri[k]], b = vertices[tri[(k + 1) % 3]], c = vertices[tri[(k + 2) % 3]];
        Vec2 u = b - a, v = c - a;
        double ang = std::atan2(std::abs(cross(u, v)), dot(u, v)) * 180.0 / 3.14159265358979323846;
        m = std::min(m, ang);
      }
    }
    return m;
  }

  // barycentric coordinates of p in triangle t
  std::array<double, 3> barycentric(int t, const Vec2& p) const {
    const auto& tri = triangles[t];
    Vec2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
    double d = cross(b - a, c - a);
    double l1 = cross(b - p, c - p) / d;
    double l2 = cross(c - p, a - p) / d;
    return {l1, l2, 1.0 - l1 - l2};
  }

  // walk from `hint` to the triangle containing p; -1 if p is outside
  int locate(const Vec2& p, int hint = 0) const {
    int t = (hint >= 0 && hint < num_triangles()) ? hint : 0;
    const double tol = -1e-12;
    for (int step = 0; step < 4 * num_triangles() + 16; step++) {
      auto l = barycentric(t, p);
      int worst = 0;
      for (int k = 1; k < 3; k++)
        if (l[k] < l[worst]) worst = k;
      if (l[worst] >= tol) return t;
      // exit across the edge opposite the most negative coordinate
      int nb = neighbors[t][(worst + 1) % 3];
      if (nb < 0) {
        // slide along the boundary: try the other negative direction
        int second = (worst + 1) % 3;
        for (int k = 0; k < 3; k++)
          if (k != worst && l[k] < l[second]) second = k;
        nb = neighbors[t][(second + 1) % 3];
        if (nb < 0 || l[second] >= 0) return -1;
        worst = second;
      }
      t = nb;
    }
    return -1;
  }
};

}  // namespace magbound
