#pragma once

// Analytic description of bounded convex planar domains: the builtin
// families (disk, ellipse, superellipse, sampled radial curve), their
// boundary curves, exact or quadrature areas, and symmetry tests.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "magbound/error.hpp"
#include "magbound/vec2.hpp"

namespace magbound {

inline constexpr double pi = std::numbers::pi;

namespace detail {

// Periodic cubic spline through (theta_i, value_i), theta in [0, 2*pi).
// Cyclic tridiagonal system solved by Thomas + Sherman-Morrison.
class PeriodicSpline {
 public:
  PeriodicSpline() = default;

  PeriodicSpline(std::vector<double> theta, std::vector<double> value)
      : t_(std::move(theta)), v_(std::move(value)) {
    const int n = static_cast<int>(t_.size());
    if (n < 3) throw ParameterError("periodic spline needs at least 3 samples");
    h_.resize(n);
    for (int i = 0; i < n; i++) {
      double next = (i + 1 < n) ? t_[i + 1] : t_[0] + 2 * pi;
      h_[i] = next - t_[i];
      if (h_[i] <= 0) throw ParameterError("sample angles must be strictly increasing");
    }
    solve_moments();
  }

  double operator()(double theta) const {
    const int n = static_cast<int>(t_.size());
    double th = wrap(theta);
    int i = static_cast<int>(std::upper_bound(t_.begin(), t_.end(), th) - t_.begin()) - 1;
    if (i < 0) i = n - 1;
    double a = th - t_[i], b = h_[i] - a;
    int j = (i + 1) % n;
    return (m_[i] * b * b * b + m_[j] * a * a * a) / (6 * h_[i]) +
           (v_[i] / h_[i] - m_[i] * h_[i] / 6) * b +
           (v_[j] / h_[i] - m_[j] * h_[i] / 6) * a;
  }

  double deriv(double theta) const {
    const int n = static_cast<int>(t_.size());
    double th = wrap(theta);
    int i = static_cast<int>(std::upper_bound(t_.begin(), t_.end(), th) - t_.begin()) - 1;
    if (i < 0) i = n - 1;
    double a = th - t_[i], b = h_[i] - a;
    int j = (i + 1) % n;
    return (-m_[i] * b * b + m_[j] * a * a) / (2 * h_[i]) +
           (v_[j] - v_[i]) / h_[i] - (m_[j] - m_[i]) * h_[i] / 6;
  }

 private:
  double wrap(double th) const {
    double w = std::fmod(th - t_[0], 2 * pi);
    if (w < 0) w += 2 * pi;
    return t_[0] + w;
  }

  void solve_moments() {
    const int n = static_cast<int>(t_.size());
    std::vector<double> diag(n), sub(n), sup(n), rhs(n);
    for (int i = 0; i < n; i++) {
      int p = (i + n - 1) % n, j = (i + 1) % n;
      sub[i] = h_[p] / 6;
      diag[i] = (h_[p] + h_[i]) / 3;
      sup[i] = h_[i] / 6;
      rhs[i] = (v_[j] - v_[i]) / h_[i] - (v_[i] - v_[p]) / h_[p];
    }
    // cyclic system: corner entries sub[0] (row 0, col n-1) and sup[n-1] (row n-1, col 0)
    auto tridiag = [&](std::vector<double> d, const std::vector<double>& r) {
      std::vector<double> c(n), x(n);
      c[0] = sup[0] / d[0];
      x[0] = r[0] / d[0];
      for (int i = 1; i < n - 1; i++) {
        double m = d[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / m;
        x[i] = (r[i] - sub[i] * x[i - 1]) / m;
      }
      double m = d[n - 1] - sub[n - 1] * c[n - 2];
      x[n - 1] = (r[n - 1] - sub[n - 1] * x[n - 2]) / m;
      for (int i = n - 2; i >= 0; i--) x[i] -= c[i] * x[i + 1];
      return x;
    };
    double gamma = -diag[0];
    std::vector<double> d(diag);
    d[0] -= gamma;
    d[n - 1] -= sub[0] * sup[n - 1] / gamma;
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = sup[n - 1];
    std::vector<double> y = tridiag(d, rhs);
    std::vector<double> z = tridiag(d, u);
    double fact = (y[0] + sub[0] * y[n - 1] / gamma) /
                  (1.0 + z[0] + sub[0] * z[n - 1] / gamma);
    m_.resize(n);
    for (int i = 0; i < n; i++) m_[i] = y[i] - fact * z[i];
  }

  std::vector<double> t_, v_, h_, m_;
};

}  // namespace detail

enum class DomainKind { Disk, Ellipse, Superellipse, RadialCurve };

// Exact description of a bounded convex planar domain, star-shaped about
// `center` with a smooth radial function rho(theta).
struct DomainSpec {
  DomainKind kind = DomainKind::Disk;
  double radius = 1.0;                                // Disk
  double alpha = 1.0, beta = 1.0;                     // Ellipse semi-axes
  int power = 4;                                      // Superellipse exponent (even, >= 4)
  double half_width = 1.0;                            // Superellipse axis intercept
  std::vector<std::pair<double, double>> samples;     // RadialCurve (angle, radius)
  Vec2 center{0, 0};

  static DomainSpec disk(double R, Vec2 c = {0, 0}) {
    DomainSpec s;
    s.kind = DomainKind::Disk;
    s.radius = R;
    s.center = c;
    s.validate();
    return s;
  }

  static DomainSpec ellipse(double a, double b, Vec2 c = {0, 0}) {
    DomainSpec s;
    s.kind = DomainKind::Ellipse;
    s.alpha = a;
    s.beta = b;
    s.center = c;
    s.validate();
    return s;
  }

  static DomainSpec superellipse(int p, double a, Vec2 c = {0, 0}) {
    DomainSpec s;
    s.kind = DomainKind::Superellipse;
    s.power = p;
    s.half_width = a;
    s.center = c;
    s.validate();
    return s;
  }

  static DomainSpec radial_curve(std::vector<std::pair<double, double>> samples,
                                 Vec2 c = {0, 0}) {
    DomainSpec s;
    s.kind = DomainKind::RadialCurve;
    s.samples = std::move(samples);
    s.center = c;
    s.validate();
    return s;
  }

  void validate() const;

  // radial distance from center to the boundary in direction theta
  double boundary_radius(double theta) const {
    switch (kind) {
      case DomainKind::Disk:
        return radius;
      case DomainKind::Ellipse: {
        double c = std::cos(theta), s = std::sin(theta);
        return alpha * beta / std::sqrt(beta * beta * c * c + alpha * alpha * s * s);
      }
      case DomainKind::Superellipse: {
        double c = std::cos(theta), s = std::sin(theta);
        double u = std::pow(std::abs(c), power) + std::pow(std::abs(s), power);
        return half_width * std::pow(u, -1.0 / power);
      }
      case DomainKind::RadialCurve:
        return spline()(theta);
    }
    return 0;
  }

  double boundary_radius_deriv(double theta) const {
    switch (kind) {
      case DomainKind::Disk:
        return 0;
      case DomainKind::Ellipse: {
        double c = std::cos(theta), s = std::sin(theta);
        double q = beta * beta * c * c + alpha * alpha * s * s;
        return -boundary_radius(theta) * (alpha * alpha - beta * beta) * s * c / q;
      }
      case DomainKind::Superellipse: {
        double c = std::cos(theta), s = std::sin(theta);
        double u = std::pow(std::abs(c), power) + std::pow(std::abs(s), power);
        double up = power * c * s *
                    (std::pow(std::abs(s), power - 2) - std::pow(std::abs(c), power - 2));
        return -boundary_radius(theta) * up / (power * u);
      }
      case DomainKind::RadialCurve:
        return spline().deriv(theta);
    }
    return 0;
  }

  Vec2 boundary_point(double theta) const {
    double r = boundary_radius(theta);
    return center + Vec2{r * std::cos(theta), r * std::sin(theta)};
  }

  // |dP/dtheta|
  double boundary_speed(double theta) const {
    double r = boundary_radius(theta), rp = boundary_radius_deriv(theta);
    return std::sqrt(r * r + rp * rp);
  }

  bool contains(const Vec2& p) const {
    Vec2 d = p - center;
    double rr = norm(d);
    if (rr == 0) return true;
    return rr < boundary_radius(std::atan2(d.y, d.x));
  }

  // signed margin to the boundary along the ray from the center (positive inside)
  double radial_margin(const Vec2& p) const {
    Vec2 d = p - center;
    double rr = norm(d);
    double th = rr == 0 ? 0.0 : std::atan2(d.y, d.x);
    return boundary_radius(th) - rr;
  }

  const detail::PeriodicSpline& spline() const {
    if (kind != DomainKind::RadialCurve) throw ArgumentError("not a radial-curve domain");
    if (!spline_built_) {
      std::vector<double> th, r;
      th.reserve(samples.size());
      r.reserve(samples.size());
      for (auto& [a, b] : samples) {
        th.push_back(a);
        r.push_back(b);
      }
      spline_ = detail::PeriodicSpline(std::move(th), std::move(r));
      spline_built_ = true;
    }
    return spline_;
  }

 private:
  mutable detail::PeriodicSpline spline_;
  mutable bool spline_built_ = false;
};

// Convexity of the polygon of n sampled boundary points: no cross product of
// consecutive edges may turn right beyond relative tolerance 1e-12. Near-zero
// turns are accepted here; superellipse boundaries are flat to high order at
// the axes and dense samplings approach zero turn there.
inline bool is_convex_sampling(const DomainSpec& spec, int n = 2048) {
  std::vector<Vec2> pts(n);
  for (int i = 0; i < n; i++) pts[i] = spec.boundary_point(2 * pi * i / n);
  double scale = 0;
  for (int i = 0; i < n; i++) {
    Vec2 e0 = pts[(i + 1) % n] - pts[i];
    Vec2 e1 = pts[(i + 2) % n] - pts[(i + 1) % n];
    scale = std::max(scale, std::abs(norm(e0) * norm(e1)));
  }
  const double tol = 1e-12 * scale;
  for (int i = 0; i < n; i++) {
    Vec2 e0 = pts[(i + 1) % n] - pts[i];
    Vec2 e1 = pts[(i + 2) % n] - pts[(i + 1) % n];
    if (cross(e0, e1) < -tol) return false;  // CCW sampling must not turn right
  }
  return true;
}

inline void DomainSpec::validate() const {
  switch (kind) {
    case DomainKind::Disk:
      if (!(radius > 0)) throw ParameterError("disk radius must be positive");
      break;
    case DomainKind::Ellipse:
      if (!(alpha > 0) || !(beta > 0))
        throw ParameterError("ellipse semi-axes must be positive");
      break;
    case DomainKind::Superellipse:
      if (power < 4 || power % 2 != 0)
        throw ParameterError("superellipse power must be an even integer >= 4");
      if (!(half_width > 0)) throw ParameterError("superellipse half width must be positive");
      break;
    case DomainKind::RadialCurve: {
      if (samples.size() < 8)
        throw ParameterError("radial curve needs at least 8 (angle, radius) samples");
      for (auto& [th, r] : samples) {
        (void)th;
        if (!(r > 0)) throw ParameterError("radial curve radii must be positive");
      }
      for (size_t i = 1; i < samples.size(); i++)
        if (!(samples[i].first > samples[i - 1].first))
          throw ParameterError("radial curve angles must be strictly increasing");
      if (samples.back().first - samples.front().first >= 2 * pi)
        throw ParameterError("radial curve angles must span less than one full turn");
      // the polygon of the sampled points themselves must be convex
      const int n = static_cast<int>(samples.size());
      std::vector<Vec2> pts(n);
      for (int i = 0; i < n; i++) {
        auto [th, r] = samples[i];
        pts[i] = center + Vec2{r * std::cos(th), r * std::sin(th)};
      }
      double scale = 0;
      for (int i = 0; i < n; i++) {
        Vec2 e0 = pts[(i + 1) % n] - pts[i];
        Vec2 e1 = pts[(i + 2) % n] - pts[(i + 1) % n];
        scale = std::max(scale, norm(e0) * norm(e1));
      }
      for (int i = 0; i < n; i++) {
        Vec2 e0 = pts[(i + 1) % n] - pts[i];
        Vec2 e1 = pts[(i + 2) % n] - pts[(i + 1) % n];
        if (cross(e0, e1) <= 1e-12 * scale)
          throw ParameterError("radial curve samples do not form a strictly convex polygon");
      }
      break;
    }
  }
}

// Domain area: closed form for disk and ellipse, otherwise the star-shaped
// identity |Omega| = 1/2 int rho(theta)^2 dtheta by composite Gauss-Legendre.
inline double area(const DomainSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case DomainKind::Disk:
      return pi * spec.radius * spec.radius;
    case DomainKind::Ellipse:
      return pi * spec.alpha * spec.beta;
    default: {
      // 10-point Gauss-Legendre on [0,1]
      static const double gx[5] = {0.0130467357414141, 0.0674683166555077,
                                   0.1602952158504878, 0.2833023029353764,
                                   0.4255628305091844};
      static const double gw[5] = {0.0333356721543441, 0.0747256745752903,
                                   0.1095431812579910, 0.1346333596549982,
                                   0.1477621123573764};
      const int panels = 512;
      double acc = 0;
      for (int p = 0; p < panels; p++) {
        double a = 2 * pi * p / panels, w = 2 * pi / panels;
        for (int q = 0; q < 5; q++) {
          for (double xi : {gx[q], 1.0 - gx[q]}) {
            double r = spec.boundary_radius(a + w * xi);
            acc += gw[q] * w * 0.5 * r * r;
          }
        }
      }
      return acc;
    }
  }
}

inline double perimeter(const DomainSpec& spec) {
  static const double gx[5] = {0.0130467357414141, 0.0674683166555077,
                               0.1602952158504878, 0.2833023029353764,
                               0.4255628305091844};
  static const double gw[5] = {0.0333356721543441, 0.0747256745752903,
                               0.1095431812579910, 0.1346333596549982,
                               0.1477621123573764};
  const int panels = 512;
  double acc = 0;
  for (int p = 0; p < panels; p++) {
    double a = 2 * pi * p / panels, w = 2 * pi / panels;
    for (int q = 0; q < 5; q++)
      for (double xi : {gx[q], 1.0 - gx[q]}) acc += gw[q] * w * spec.boundary_speed(a + w * xi);
  }
  return acc;
}

// distance from the center to the nearest tangent line of the boundary;
// a lower bound for the in-radius of a convex domain containing the center
inline double center_clearance(const DomainSpec& spec) {
  double d = std::numeric_limits<double>::max();
  const int n = 4096;
  for (int i = 0; i < n; i++) {
    double th = 2 * pi * i / n;
    double r = spec.boundary_radius(th), rp = spec.boundary_radius_deriv(th);
    d = std::min(d, r * r / std::sqrt(r * r + rp * rp));
  }
  return d;
}

// True iff the domain is invariant under (x1,x2) -> (-x1,x2) and
// (x1,x2) -> (x2,x1); decided analytically per family.
inline bool has_dihedral_symmetry(const DomainSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case DomainKind::Disk:
      return true;
    case DomainKind::Ellipse:
      return spec.alpha == spec.beta;
    case DomainKind::Superellipse:
      return true;
    case DomainKind::RadialCurve: {
      const double tol = 1e-9;
      double scale = spec.boundary_radius(0);
      for (auto& [th, r] : spec.samples) {
        if (std::abs(spec.boundary_radius(pi - th) - r) > tol * scale) return false;
        if (std::abs(spec.boundary_radius(pi / 2 - th) - r) > tol * scale) return false;
      }
      return true;
    }
  }
  return false;
}

inline std::string kind_name(DomainKind k) {
  switch (k) {
    case DomainKind::Disk: return "disk";
    case DomainKind::Ellipse: return "ellipse";
    case DomainKind::Superellipse: return "superellipse";
    case DomainKind::RadialCurve: return "radial";
  }
  return "?";
}

}  // namespace magbound
