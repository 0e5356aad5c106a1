#pragma once

// Lowest magnetic Neumann eigenvalue of a disk through the fiber
// decomposition: one weighted Sturm-Liouville problem per angular mode m with
// potential (m/r - b r/2)^2, weight r dr, natural condition at r = R and
// regularity at r = 0. Finite volumes on cell centers, inverse iteration,
// Richardson extrapolation over two grids.

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "magbound/error.hpp"

namespace magbound {

struct FiberProblem {
  double b = 0;       // field intensity, >= 0
  int m = 0;          // angular mode
  double R = 1;       // disk radius
  int n_points = 4096;

  void validate() const {
    if (!(b >= 0)) throw ArgumentError("field intensity must be non-negative");
    if (!(R > 0)) throw ArgumentError("disk radius must be positive");
    if (n_points < 64) throw ArgumentError("radial grid needs at least 64 points");
  }
};

struct FiberResult {
  double mu1 = 0;         // Richardson-extrapolated eigenvalue
  double mu1_fine = 0;    // raw value on the 2n grid
  double mu1_coarse = 0;  // raw value on the n grid
  std::vector<double> r;  // fine-grid cell centers
  std::vector<double> f;  // eigenfunction samples, normalized in the r dr norm
};

namespace detail {

// lowest eigenvalue of the fiber problem on one cell-centered grid
inline double fiber_grid_eigen(double b, int m, double R, int n, std::vector<double>* fun) {
  const double h = R / n;
  auto V = [&](double r) {
    double t = m / r - 0.5 * b * r;
    return t * t;
  };
  // A f = mu W f; A symmetric tridiagonal after the W^(-1/2) similarity
  std::vector<double> diag(n), off(n - 1), w(n);
  for (int c = 0; c < n; c++) {
    double rc = (c + 0.5) * h;
    double face_l = c * h, face_r = (c + 1 < n) ? (c + 1) * h : 0.0;  // flux 0 at r = R
    w[c] = rc * h;
    diag[c] = (face_l + face_r) / h + V(rc) * w[c];
  }
  for (int c = 0; c + 1 < n; c++) off[c] = -(double)(c + 1);  // -face/h
  // symmetrize
  for (int c = 0; c < n; c++) diag[c] /= w[c];
  for (int c = 0; c + 1 < n; c++) off[c] /= std::sqrt(w[c] * w[c + 1]);

  // inverse iteration with shift 0, deterministic all-ones start; the
  // eigenvalue estimate is the Rayleigh quotient of the inverse,
  // theta = x . B^{-1} x, which sums same-sign terms and avoids the
  // cancellation of x . (B x) against the 1/h^2 diagonal
  std::vector<double> x(n, 1.0), y(n), cp(n), dp(n);
  double nrm = std::sqrt((double)n);
  for (double& v : x) v /= nrm;
  double theta = 0, theta_prev = -1;
  int it = 0;
  for (; it < 2000; it++) {
    // Thomas solve B y = x
    cp[0] = off.empty() ? 0.0 : off[0] / diag[0];
    dp[0] = x[0] / diag[0];
    for (int c = 1; c < n; c++) {
      double mden = diag[c] - off[c - 1] * cp[c - 1];
      if (mden == 0) throw SolverError("singular fiber system");
      cp[c] = (c + 1 < n) ? off[c] / mden : 0.0;
      dp[c] = (x[c] - off[c - 1] * dp[c - 1]) / mden;
    }
    y[n - 1] = dp[n - 1];
    for (int c = n - 2; c >= 0; c--) y[c] = dp[c] - cp[c] * y[c + 1];

    theta = 0;
    for (int c = 0; c < n; c++) theta += x[c] * y[c];

    double yn = 0;
    for (double v : y) yn += v * v;
    yn = std::sqrt(yn);
    for (int c = 0; c < n; c++) x[c] = y[c] / yn;

    if (it > 2 && std::abs(theta - theta_prev) <= 1e-14 * std::abs(theta) + 1e-300) break;
    theta_prev = theta;
  }
  if (it >= 2000) throw SolverError("fiber eigenvalue iteration did not converge");

  // evaluate the eigenvalue as the quadratic-form Rayleigh quotient of the
  // converged iterate; both sums have positive terms only, so the estimate
  // does not inherit the 1/h^2 cancellation noise of B x
  std::vector<double> fvec(n);
  for (int c = 0; c < n; c++) fvec[c] = x[c] / std::sqrt(w[c]);
  double num = 0, den = 0;
  for (int c = 0; c + 1 < n; c++) {
    double df = fvec[c + 1] - fvec[c];
    num += (c + 1) * df * df;  // face r / h * (delta f)^2 with face = (c+1) h
  }
  for (int c = 0; c < n; c++) {
    double rc = (c + 0.5) * h;
    num += V(rc) * w[c] * fvec[c] * fvec[c];
    den += w[c] * fvec[c] * fvec[c];
  }
  double rho = num / den;

  if (fun) {
    fun->resize(n);
    double s = 0;
    for (int c = 0; c < n; c++) {
      (*fun)[c] = x[c] / std::sqrt(w[c]);
      s += (*fun)[c] * (*fun)[c] * w[c];
    }
    double scale = 1.0 / std::sqrt(s);
    if ((*fun)[0] < 0) scale = -scale;
    for (double& v : *fun) v *= scale;
  }
  return rho;
}

}  // namespace detail

inline FiberResult fiber_mu1(const FiberProblem& p) {
  p.validate();
  FiberResult res;
  const int n2 = 2 * p.n_points;
  res.r.resize(n2);
  const double h2 = p.R / n2;
  for (int c = 0; c < n2; c++) res.r[c] = (c + 0.5) * h2;

  if (p.b == 0 && p.m == 0) {
    res.mu1 = res.mu1_fine = res.mu1_coarse = 0.0;
    res.f.assign(n2, std::sqrt(2.0) / p.R);  // constant with unit r dr norm
    return res;
  }
  res.mu1_coarse = detail::fiber_grid_eigen(p.b, p.m, p.R, p.n_points, nullptr);
  res.mu1_fine = detail::fiber_grid_eigen(p.b, p.m, p.R, n2, &res.f);
  res.mu1 = (4.0 * res.mu1_fine - res.mu1_coarse) / 3.0;
  return res;
}

struct DiskSpectrum {
  double mu1 = 0;
  int minimizing_mode = 0;
  std::map<int, double> per_mode;       // m -> mu_1^{b,m}(R) over the scanned window
  std::vector<double> ground_r;         // radial grid of the minimizing mode
  std::vector<double> ground_profile;   // its eigenfunction, r dr normalized
  double b = 0, R = 1;
};

// mu_1^b(B_R) = inf over modes; scans a window that grows until the minimum
// is interior to it.
inline DiskSpectrum disk_mu1(double b, double R, int n_points = 4096) {
  if (!(b >= 0)) throw ArgumentError("field intensity must be non-negative");
  if (!(R > 0)) throw ArgumentError("disk radius must be positive");
  DiskSpectrum spec;
  spec.b = b;
  spec.R = R;

  int M = (int)std::ceil(b * R * R / 2.0) + 4;
  for (;;) {
    if (M > 64)
      throw ModeScanError("mode window exceeded |m| = 64; parameters far outside the regime");
    int best_m = 0;
    double best = std::numeric_limits<double>::max();
    for (int m = -M; m <= M; m++) {
      if (!spec.per_mode.count(m)) {
        FiberProblem p{b, m, R, n_points};
        spec.per_mode[m] = fiber_mu1(p).mu1;
      }
      if (spec.per_mode[m] < best) {
        best = spec.per_mode[m];
        best_m = m;
      }
    }
    if (std::abs(best_m) < M || b == 0) {
      spec.minimizing_mode = best_m;
      spec.mu1 = best;
      break;
    }
    M += 4;
  }

  FiberResult ground = fiber_mu1({b, spec.minimizing_mode, R, n_points});
  spec.ground_r = std::move(ground.r);
  spec.ground_profile = std::move(ground.f);
  return spec;
}

// relative discrepancy of mu_1^b(B_1) against t^2 mu_1^{b/t^2}(B_t)
inline double scaling_check(double b, double t, int n_points = 4096) {
  if (!(b > 0) || !(t > 0)) throw ArgumentError("scaling check needs positive b and t");
  double lhs = disk_mu1(b, 1.0, n_points).mu1;
  double rhs = t * t * disk_mu1(b / (t * t), t, n_points).mu1;
  return std::abs(lhs - rhs) / lhs;
}

// mu_1^b(B_R) over an R grid inside (0, b^(-1/2)); strict increase is the
// caller's assertion
inline std::vector<double> monotonicity_scan_R(double b, const std::vector<double>& R_grid,
                                               int n_points = 4096) {
  std::vector<double> out;
  out.reserve(R_grid.size());
  for (double R : R_grid) {
    if (!(R > 0) || !(b * R * R < 1.0))
      throw ArgumentError("R grid point violates b R^2 < 1");
    out.push_back(disk_mu1(b, R, n_points).mu1);
  }
  return out;
}

// u(b) = mu_1^b(B_R)/b^2 over a small-intensity grid
inline std::vector<double> monotonicity_scan_b(double R, const std::vector<double>& b_grid,
                                               int n_points = 4096) {
  for (size_t i = 0; i < b_grid.size(); i++) {
    if (!(b_grid[i] > 0)) throw ArgumentError("b grid must be positive");
    if (i > 0 && !(b_grid[i] > b_grid[i - 1]))
      throw ArgumentError("b grid must be increasing");
  }
  if (!b_grid.empty() && !(b_grid.back() * R * R < 1.0))
    throw ArgumentError("b grid exceeds the b R^2 < 1 regime");
  std::vector<double> out;
  out.reserve(b_grid.size());
  for (double b : b_grid) out.push_back(disk_mu1(b, R, n_points).mu1 / (b * b));
  return out;
}

// Clamped cubic spline used to evaluate radial profiles between cell centers.
class RadialInterpolant {
 public:
  RadialInterpolant() = default;

  // clamped end slopes d0 and dn
  RadialInterpolant(std::vector<double> x, std::vector<double> y, double d0, double dn)
      : x_(std::move(x)), y_(std::move(y)) {
    const int n = (int)x_.size();
    if (n < 3) throw ArgumentError("radial interpolant needs at least 3 samples");
    std::vector<double> a(n), bq(n), c(n), d(n);
    std::vector<double> h(n - 1);
    for (int i = 0; i + 1 < n; i++) h[i] = x_[i + 1] - x_[i];
    // clamped boundary rows
    bq[0] = 2 * h[0];
    c[0] = h[0];
    d[0] = 6 * ((y_[1] - y_[0]) / h[0] - d0);
    for (int i = 1; i + 1 < n; i++) {
      a[i] = h[i - 1];
      bq[i] = 2 * (h[i - 1] + h[i]);
      c[i] = h[i];
      d[i] = 6 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
    }
    a[n - 1] = h[n - 2];
    bq[n - 1] = 2 * h[n - 2];
    d[n - 1] = 6 * (dn - (y_[n - 1] - y_[n - 2]) / h[n - 2]);
    // Thomas
    m_.resize(n);
    for (int i = 1; i < n; i++) {
      double f = a[i] / bq[i - 1];
      bq[i] -= f * c[i - 1];
      d[i] -= f * d[i - 1];
    }
    m_[n - 1] = d[n - 1] / bq[n - 1];
    for (int i = n - 2; i >= 0; i--) m_[i] = (d[i] - c[i] * m_[i + 1]) / bq[i];
  }

  double value(double x) const {
    auto [i, t, h] = locate(x);
    double A = (1 - t), B = t;
    return A * y_[i] + B * y_[i + 1] +
           h * h / 6.0 * ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]);
  }

  double deriv(double x) const {
    auto [i, t, h] = locate(x);
    double A = (1 - t), B = t;
    return (y_[i + 1] - y_[i]) / h +
           h / 6.0 * ((3 * B * B - 1) * m_[i + 1] - (3 * A * A - 1) * m_[i]);
  }

 private:
  std::tuple<int, double, double> locate(double x) const {
    const int n = (int)x_.size();
    x = std::clamp(x, x_.front(), x_.back());
    int i = (int)(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
    i = std::clamp(i, 0, n - 2);
    double h = x_[i + 1] - x_[i];
    return {i, (x - x_[i]) / h, h};
  }

  std::vector<double> x_, y_, m_;
};

// Interpolant of a disk ground profile extended to [0, R] with even-function
// ends (zero clamped slope at both endpoints, values extrapolated).
inline RadialInterpolant ground_profile_interpolant(const std::vector<double>& r,
                                                    const std::vector<double>& f, double R) {
  if (r.size() != f.size() || r.size() < 4)
    throw ArgumentError("profile interpolant needs matching sample arrays");
  std::vector<double> x, y;
  x.reserve(r.size() + 2);
  y.reserve(r.size() + 2);
  x.push_back(0.0);
  y.push_back((9.0 * f[0] - f[1]) / 8.0);
  x.insert(x.end(), r.begin(), r.end());
  y.insert(y.end(), f.begin(), f.end());
  x.push_back(R);
  y.push_back((9.0 * f[f.size() - 1] - f[f.size() - 2]) / 8.0);
  return RadialInterpolant(std::move(x), std::move(y), 0.0, 0.0);
}

}  // namespace magbound
