#pragma once

// Test-only oracle: shooting method for the radial fiber problem
//   f'' + f'/r + (mu - (m/r - b r/2)^2) f = 0,  f'(R) = 0,
// regular at r = 0. Series start near the origin, fixed-step RK4, bisection
// on the Neumann mismatch f'(R). Independent of the finite-volume solver.

#include <cmath>
#include <stdexcept>

namespace oracle {

namespace detail {

struct ShotState {
  double f, fp;
};

// integrate from r_start to R with n RK4 steps; y = (f, f')
inline ShotState integrate(double b, int m, double R, double mu, int n) {
  const int am = m < 0 ? -m : m;
  const double h = R / n;
  // series f = r^|m| (1 + a1 r^2 + a2 r^4 + a3 r^6) from the Frobenius recursion
  double a[4] = {1.0, 0.0, 0.0, 0.0};
  double lam = mu + m * b;  // coefficient of the r^0 potential term
  double q = 0.25 * b * b;
  for (int k = 1; k <= 3; k++) {
    double prev2 = (k >= 2) ? a[k - 2] : 0.0;
    a[k] = (q * prev2 - lam * a[k - 1]) / (4.0 * k * (k + am));
  }
  int start_cells = 8;
  double r0 = start_cells * h;
  if (r0 > 0.05 * R) {
    r0 = 0.05 * R;
    start_cells = (int)(r0 / h);
    r0 = start_cells * h;
  }
  double r2 = r0 * r0;
  double poly = 1 + a[1] * r2 + a[2] * r2 * r2 + a[3] * r2 * r2 * r2;
  double dpoly = 2 * a[1] * r0 + 4 * a[2] * r0 * r2 + 6 * a[3] * r0 * r2 * r2;
  double rm = std::pow(r0, am);
  ShotState y{rm * poly, am * (am ? std::pow(r0, am - 1) : 0.0) * poly + rm * dpoly};
  if (am == 0) y = {poly, dpoly};

  auto rhs = [&](double r, const ShotState& s) {
    double t = m / r - 0.5 * b * r;
    return ShotState{s.fp, -s.fp / r + (t * t - mu) * s.f};
  };
  double r = r0;
  for (int i = start_cells; i < n; i++) {
    ShotState k1 = rhs(r, y);
    ShotState k2 = rhs(r + 0.5 * h, {y.f + 0.5 * h * k1.f, y.fp + 0.5 * h * k1.fp});
    ShotState k3 = rhs(r + 0.5 * h, {y.f + 0.5 * h * k2.f, y.fp + 0.5 * h * k2.fp});
    ShotState k4 = rhs(r + h, {y.f + h * k3.f, y.fp + h * k3.fp});
    y.f += h / 6.0 * (k1.f + 2 * k2.f + 2 * k3.f + k4.f);
    y.fp += h / 6.0 * (k1.fp + 2 * k2.fp + 2 * k3.fp + k4.fp);
    r += h;
    // the solution grows for mu below the eigenvalue; rescale to avoid overflow
    double mag = std::abs(y.f) + std::abs(y.fp);
    if (mag > 1e200) {
      y.f /= mag;
      y.fp /= mag;
    }
  }
  return y;
}

// Rayleigh quotient of the trial r^|m| (or 1 for m = 0), an upper bound for
// the lowest eigenvalue; Simpson quadrature
inline double trial_upper_bound(double b, int m, double R) {
  const int am = m < 0 ? -m : m;
  const int n = 20000;
  const double h = R / n;
  double num = 0, den = 0;
  for (int i = 0; i <= n; i++) {
    double r = std::max(i * h, 1e-12 * R);
    double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    double f = std::pow(r, am);
    double fp = am ? am * std::pow(r, am - 1) : 0.0;
    double t = m / r - 0.5 * b * r;
    num += w * (fp * fp + t * t * f * f) * r;
    den += w * f * f * r;
  }
  return num / den;
}

}  // namespace detail

// lowest eigenvalue by scanning f'(R; mu) for its first sign change and
// bisecting; n_steps RK4 steps per shot
inline double shoot_mu1(double b, int m, double R, int n_steps = 100000) {
  auto S = [&](double mu, int n) { return detail::integrate(b, m, R, mu, n).fp; };
  double hi = detail::trial_upper_bound(b, m, R) * 1.000001;
  double lo = 0.0;
  const int scan_n = 20000;
  double s_lo = S(lo + 1e-12 * hi, scan_n);
  double step = hi / 256.0;
  double a = lo, sa = s_lo;
  double bnd = -1;
  for (int i = 1; i <= 256 + 2; i++) {
    double x = std::min(lo + i * step, hi);
    double sx = S(x, scan_n);
    if ((sa > 0) != (sx > 0)) {
      bnd = x;
      break;
    }
    a = x;
    sa = sx;
    if (x >= hi) break;
  }
  if (bnd < 0) throw std::runtime_error("shooting oracle: no sign change up to the trial bound");
  double fa = S(a, n_steps), fb = S(bnd, n_steps);
  if ((fa > 0) == (fb > 0)) throw std::runtime_error("shooting oracle: bracket lost");
  for (int it = 0; it < 200; it++) {
    double mid = 0.5 * (a + bnd);
    if (mid == a || mid == bnd) break;
    double fm = S(mid, n_steps);
    if ((fm > 0) == (fa > 0)) {
      a = mid;
      fa = fm;
    } else {
      bnd = mid;
      fb = fm;
    }
  }
  return 0.5 * (a + bnd);
}

}  // namespace oracle
