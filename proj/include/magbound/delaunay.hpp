#pragma once

// Delaunay triangulation (Bowyer-Watson) and quality refinement for convex
// smooth domains: boundary sampled at arclength-equidistributed points on the
// analytic curve, interior seeded with a hex lattice, then circumcenter
// insertion until every triangle meets the 25-degree minimum-angle bound and
// the size bound.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "magbound/geometry.hpp"
#include "magbound/mesh.hpp"

namespace magbound {
namespace detail {

inline double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  long double acx = (long double)a.x - c.x, acy = (long double)a.y - c.y;
  long double bcx = (long double)b.x - c.x, bcy = (long double)b.y - c.y;
  return (double)(acx * bcy - acy * bcx);
}

// > 0 iff d lies inside the circumcircle of CCW triangle (a,b,c)
inline double in_circle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  long double adx = (long double)a.x - d.x, ady = (long double)a.y - d.y;
  long double bdx = (long double)b.x - d.x, bdy = (long double)b.y - d.y;
  long double cdx = (long double)c.x - d.x, cdy = (long double)c.y - d.y;
  long double ad = adx * adx + ady * ady;
  long double bd = bdx * bdx + bdy * bdy;
  long double cd = cdx * cdx + cdy * cdy;
  long double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                    ad * (bdx * cdy - bdy * cdx);
  return (double)det;
}

class DelaunayBuilder {
 public:
  explicit DelaunayBuilder(const Vec2& lo, const Vec2& hi) {
    // generous super-triangle; stays in place until extraction
    Vec2 c = (lo + hi) * 0.5;
    double d = std::max(hi.x - lo.x, hi.y - lo.y) * 64.0 + 1.0;
    pts_.push_back(c + Vec2{-3 * d, -d});
    pts_.push_back(c + Vec2{3 * d, -d});
    pts_.push_back(c + Vec2{0, 3 * d});
    tris_.push_back({0, 1, 2});
    nbrs_.push_back({-1, -1, -1});
    alive_.push_back(1);
  }

  // returns vertex index, or -1 if p duplicates an existing vertex
  int insert(const Vec2& p, double dup_tol) {
    int t = locate(p);
    for (int k = 0; k < 3; k++)
      if (norm(pts_[tris_[t][k]] - p) < dup_tol) return -1;

    // grow the cavity of triangles whose circumcircle contains p
    std::vector<int> cavity;
    std::vector<char> in_cavity(tris_.size(), 0);
    std::vector<int> stack{t};
    in_cavity[t] = 1;
    while (!stack.empty()) {
      int s = stack.back();
      stack.pop_back();
      cavity.push_back(s);
      for (int k = 0; k < 3; k++) {
        int nb = nbrs_[s][k];
        if (nb < 0 || in_cavity[nb]) continue;
        const auto& tr = tris_[nb];
        if (in_circle(pts_[tr[0]], pts_[tr[1]], pts_[tr[2]], p) > 0) {
          in_cavity[nb] = 1;
          stack.push_back(nb);
        }
      }
    }

    // boundary edges of the cavity, each with its outside neighbor
    struct Rim { int v0, v1, outside; };
    std::vector<Rim> rim;
    for (int s : cavity)
      for (int k = 0; k < 3; k++) {
        int nb = nbrs_[s][k];
        if (nb >= 0 && in_cavity[nb]) continue;
        rim.push_back({tris_[s][k], tris_[s][(k + 1) % 3], nb});
      }

    int vp = static_cast<int>(pts_.size());
    pts_.push_back(p);

    // star-retriangulate; reuse cavity slots, then append
    std::vector<int> fresh(rim.size());
    size_t reuse = 0;
    for (size_t i = 0; i < rim.size(); i++) {
      int slot;
      if (reuse < cavity.size()) {
        slot = cavity[reuse++];
      } else {
        slot = static_cast<int>(tris_.size());
        tris_.push_back({});
        nbrs_.push_back({});
        alive_.push_back(1);
      }
      tris_[slot] = {rim[i].v0, rim[i].v1, vp};
      nbrs_[slot] = {rim[i].outside, -1, -1};
      alive_[slot] = 1;
      fresh[i] = slot;
      if (rim[i].outside >= 0) {
        auto& on = nbrs_[rim[i].outside];
        for (int k = 0; k < 3; k++) {
          if (tris_[rim[i].outside][k] == rim[i].v1 &&
              tris_[rim[i].outside][(k + 1) % 3] == rim[i].v0)
            on[k] = slot;
        }
      }
    }
    for (; reuse < cavity.size(); reuse++) alive_[cavity[reuse]] = 0;

    // link fresh triangles around vp: edge (v1, vp) of one matches (vp, v0) of the next
    std::map<int, int> by_first;  // rim v0 -> slot
    for (size_t i = 0; i < rim.size(); i++) by_first[rim[i].v0] = fresh[i];
    for (size_t i = 0; i < rim.size(); i++) {
      int next = by_first[rim[i].v1];            // triangle whose rim edge starts at v1
      nbrs_[fresh[i]][1] = next;                 // edge (v1, vp)
      nbrs_[next][2] = fresh[i];                 // edge (vp, v0=v1)
    }
    last_ = fresh.empty() ? last_ : fresh[0];
    return vp;
  }

  int locate(const Vec2& p) const {
    int t = (last_ >= 0 && last_ < (int)tris_.size() && alive_[last_]) ? last_ : first_alive();
    for (int step = 0; step < (int)tris_.size() * 4 + 64; step++) {
      const auto& tr = tris_[t];
      int exit = -1;
      double worst = -1e-300;
      for (int k = 0; k < 3; k++) {
        double o = orient(pts_[tr[k]], pts_[tr[(k + 1) % 3]], p);
        if (o < 0 && (exit < 0 || o < worst)) {
          exit = k;
          worst = o;
        }
      }
      if (exit < 0) return t;
      int nb = nbrs_[t][exit];
      if (nb < 0) return t;  // should not happen with a super-triangle in place
      t = nb;
    }
    throw InternalError("Delaunay point location did not terminate");
  }

  const std::vector<Vec2>& points() const { return pts_; }

  // triangles with all-real vertices (super vertices are 0,1,2)
  template <class F>
  void for_each_real_triangle(F&& f) const {
    for (size_t t = 0; t < tris_.size(); t++) {
      if (!alive_[t]) continue;
      const auto& tr = tris_[t];
      if (tr[0] < 3 || tr[1] < 3 || tr[2] < 3) continue;
      f(tr);
    }
  }

 private:
  int first_alive() const {
    for (size_t t = 0; t < tris_.size(); t++)
      if (alive_[t]) return static_cast<int>(t);
    throw InternalError("empty triangulation");
  }

  std::vector<Vec2> pts_;
  std::vector<std::array<int, 3>> tris_;
  std::vector<std::array<int, 3>> nbrs_;
  std::vector<char> alive_;
  int last_ = 0;
};

inline double hash_jitter(std::uint64_t i, std::uint64_t j) {
  std::uint64_t h = i * 0x9E3779B97F4A7C15ull ^ (j + 0xD1B54A32D192ED03ull) * 0xBF58476D1CE4E5B9ull;
  h ^= h >> 31;
  h *= 0x94D049BB133111EBull;
  h ^= h >> 29;
  return (double)(h % 1000003ull) / 1000003.0 - 0.5;
}

}  // namespace detail

// Arclength-equidistributed boundary angles: n points such that consecutive
// boundary arcs have equal length.
inline std::vector<double> equidistributed_angles(const DomainSpec& spec, int n) {
  const int m = std::max(4096, 16 * n);
  std::vector<double> cum(m + 1, 0.0);
  for (int i = 0; i < m; i++) {
    double a = 2 * pi * i / m, b = 2 * pi * (i + 1) / m;
    double mid = 0.5 * (a + b);
    // Simpson per panel
    cum[i + 1] = cum[i] + (b - a) / 6.0 *
                              (spec.boundary_speed(a) + 4 * spec.boundary_speed(mid) +
                               spec.boundary_speed(b));
  }
  double total = cum[m];
  std::vector<double> angles(n);
  int seg = 0;
  for (int k = 0; k < n; k++) {
    double target = total * k / n;
    while (seg + 1 < m && cum[seg + 1] < target) seg++;
    double f = (target - cum[seg]) / (cum[seg + 1] - cum[seg]);
    angles[k] = 2 * pi * (seg + f) / m;
  }
  return angles;
}

// Conforming triangulation with boundary vertices on the analytic curve.
// Max edge <= 2 * target_h, min angle >= 25 degrees.
inline TriMesh triangulate(const DomainSpec& spec, double target_h) {
  spec.validate();
  if (!(target_h > 0)) throw MeshError("target_h must be positive");
  double clearance = center_clearance(spec);
  if (target_h >= clearance)
    throw MeshError("target_h too coarse to resolve the boundary (exceeds the in-radius)");

  // worst-case ratio of true boundary distance to radial margin, used to
  // convert radial margins into conservative distances
  double cos_factor = 1.0;
  for (int i = 0; i < 1024; i++) {
    double th = 2 * pi * i / 1024;
    double r = spec.boundary_radius(th), rp = spec.boundary_radius_deriv(th);
    cos_factor = std::min(cos_factor, r / std::sqrt(r * r + rp * rp));
  }

  const double per = perimeter(spec);
  int n_b = std::max(16, (int)std::ceil(per / target_h));
  std::vector<double> bangles = equidistributed_angles(spec, n_b);
  std::vector<Vec2> bpts(n_b);
  Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  for (int k = 0; k < n_b; k++) {
    bpts[k] = spec.boundary_point(bangles[k]);
    lo.x = std::min(lo.x, bpts[k].x);
    lo.y = std::min(lo.y, bpts[k].y);
    hi.x = std::max(hi.x, bpts[k].x);
    hi.y = std::max(hi.y, bpts[k].y);
  }

  detail::DelaunayBuilder dt(lo, hi);
  const double dup_tol = 1e-9 * target_h;

  std::vector<int> boundary_vids;           // builder vertex id per boundary point
  std::vector<double> boundary_angle;       // matching angles, kept sorted
  for (int k = 0; k < n_b; k++) {
    int id = dt.insert(bpts[k], dup_tol);
    if (id < 0) throw MeshError("duplicate boundary vertex");
    boundary_vids.push_back(id);
    boundary_angle.push_back(bangles[k]);
  }

  // hex lattice interior seed
  const double h = target_h;
  const double row = h * std::sqrt(3.0) / 2.0;
  int j0 = (int)std::floor(lo.y / row) - 1, j1 = (int)std::ceil(hi.y / row) + 1;
  std::set<int> boundary_id_set(boundary_vids.begin(), boundary_vids.end());
  for (int j = j0; j <= j1; j++) {
    double y = j * row;
    double off = (j & 1) ? 0.5 * h : 0.0;
    int i0 = (int)std::floor((lo.x - off) / h) - 1, i1 = (int)std::ceil((hi.x - off) / h) + 1;
    for (int i = i0; i <= i1; i++) {
      Vec2 p{i * h + off + 1e-4 * h * detail::hash_jitter(i + (1 << 20), j),
             y + 1e-4 * h * detail::hash_jitter(j + (1 << 20), i)};
      if (spec.radial_margin(p) * cos_factor < 0.62 * h) continue;
      dt.insert(p, dup_tol);
    }
  }

  // quality + size refinement
  auto circumcenter = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    Vec2 ab = b - a, ac = c - a;
    double d = 2 * cross(ab, ac);
    double ab2 = norm2(ab), ac2 = norm2(ac);
    return a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
  };
  const double min_angle_rad = 25.0 * pi / 180.0;
  const double sin_bound = std::sin(min_angle_rad);
  for (int pass = 0; pass < 64; pass++) {
    struct Bad { Vec2 cc; double rad; };
    std::vector<Bad> bad;
    dt.for_each_real_triangle([&](const std::array<int, 3>& tr) {
      const Vec2 &a = dt.points()[tr[0]], &b = dt.points()[tr[1]], &c = dt.points()[tr[2]];
      double la = norm(b - c), lb = norm(c - a), lc = norm(a - b);
      double area2 = std::abs(cross(b - a, c - a));
      if (area2 <= 0) return;
      double R = la * lb * lc / (2 * area2);
      double lmin = std::min({la, lb, lc});
      // sin(opposite angle) = l / (2R); smallest angle is opposite shortest edge
      bool skinny = lmin / (2 * R) < sin_bound;
      bool oversize = R > 1.02 * target_h;
      if (skinny || oversize) bad.push_back({circumcenter(a, b, c), R});
    });
    if (bad.empty()) break;
    if (pass == 63) throw MeshError("refinement did not converge");
    int inserted = 0;
    for (const auto& bd : bad) {
      if (spec.radial_margin(bd.cc) * cos_factor >= 0.70 * target_h) {
        if (dt.insert(bd.cc, dup_tol) >= 0) inserted++;
      } else {
        // encroached near the boundary: split the nearest boundary arc on the curve
        Vec2 d = bd.cc - spec.center;
        double th = std::atan2(d.y, d.x);
        if (th < boundary_angle.front()) th += 2 * pi;
        auto it = std::upper_bound(boundary_angle.begin(), boundary_angle.end(), th);
        size_t k1 = it - boundary_angle.begin();
        size_t k0 = k1 - 1;
        double a0 = boundary_angle[k0];
        double a1 = (k1 < boundary_angle.size()) ? boundary_angle[k1]
                                                 : boundary_angle.front() + 2 * pi;
        if (a1 - a0 < 1e-3 * target_h / spec.boundary_radius(a0)) continue;  // already dense
        double amid = 0.5 * (a0 + a1);
        int id = dt.insert(spec.boundary_point(amid), dup_tol);
        if (id >= 0) {
          boundary_angle.insert(boundary_angle.begin() + k1, amid);
          boundary_vids.insert(boundary_vids.begin() + k1, id);
          boundary_id_set.insert(id);
          inserted++;
        }
      }
    }
    if (inserted == 0) break;  // nothing else can be done; invariants checked below
  }

  // extract the final mesh
  TriMesh mesh;
  mesh.target_h = target_h;
  std::vector<int> remap(dt.points().size(), -1);
  dt.for_each_real_triangle([&](const std::array<int, 3>& tr) {
    std::array<int, 3> out;
    for (int k = 0; k < 3; k++) {
      if (remap[tr[k]] < 0) {
        remap[tr[k]] = mesh.num_vertices();
        mesh.vertices.push_back(dt.points()[tr[k]]);
      }
      out[k] = remap[tr[k]];
    }
    if (detail::orient(mesh.vertices[out[0]], mesh.vertices[out[1]], mesh.vertices[out[2]]) < 0)
      std::swap(out[1], out[2]);
    mesh.triangles.push_back(out);
  });

  // adjacency from the edge table
  std::map<std::pair<int, int>, std::pair<int, int>> half;  // directed edge -> (tri, slot)
  mesh.neighbors.assign(mesh.num_triangles(), {-1, -1, -1});
  for (int t = 0; t < mesh.num_triangles(); t++)
    for (int k = 0; k < 3; k++) {
      int u = mesh.triangles[t][k], v = mesh.triangles[t][(k + 1) % 3];
      half[{u, v}] = {t, k};
    }
  for (auto& [e, ts] : half) {
    auto rev = half.find({e.second, e.first});
    if (rev != half.end()) mesh.neighbors[ts.first][ts.second] = rev->second.first;
  }

  // boundary loop and outward normals
  mesh.is_boundary_vertex.assign(mesh.num_vertices(), 0);
  for (int t = 0; t < mesh.num_triangles(); t++)
    for (int k = 0; k < 3; k++) {
      if (mesh.neighbors[t][k] >= 0) continue;
      BoundaryEdge be;
      be.v0 = mesh.triangles[t][k];
      be.v1 = mesh.triangles[t][(k + 1) % 3];
      Vec2 edge = mesh.vertices[be.v1] - mesh.vertices[be.v0];
      Vec2 nrm = normalized(Vec2{edge.y, -edge.x});  // right of CCW direction = outward
      Vec2 midpoint = (mesh.vertices[be.v0] + mesh.vertices[be.v1]) * 0.5;
      if (dot(nrm, midpoint - spec.center) < 0) nrm = nrm * -1.0;
      be.normal = nrm;
      mesh.boundary_edges.push_back(be);
      mesh.is_boundary_vertex[be.v0] = 1;
      mesh.is_boundary_vertex[be.v1] = 1;
    }

  // invariants: quality bound met, positive areas, a single closed loop
  if (mesh.min_angle_deg() < 25.0 - 1e-9)
    throw MeshError("refinement finished below the 25 degree angle bound");
  for (int t = 0; t < mesh.num_triangles(); t++)
    if (mesh.triangle_area(t) <= 0) throw MeshError("degenerate triangle in mesh");
  {
    std::map<int, int> next;
    for (auto& be : mesh.boundary_edges) {
      if (next.count(be.v0)) throw MeshError("boundary is not a simple loop");
      next[be.v0] = be.v1;
    }
    if (!next.empty()) {
      int start = next.begin()->first, cur = start;
      size_t steps = 0;
      do {
        auto it = next.find(cur);
        if (it == next.end()) throw MeshError("boundary loop is not closed");
        cur = it->second;
        steps++;
      } while (cur != start && steps <= next.size());
      if (steps != next.size()) throw MeshError("boundary has more than one loop");
    }
  }
  return mesh;
}

}  // namespace magbound
