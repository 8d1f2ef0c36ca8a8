#pragma once

// Reference computations written independently of the library code paths
// they check: explicit component formulas, brute-force loops and quadrature.

#include <cmath>
#include <deque>
#include <vector>

#include <Eigen/Core>

namespace oracle {

/// Point dipole along +z, SI units in, µT out, written component by component.
inline Eigen::Vector3d dipole_field_ut(double moment, double x_mm, double y_mm, double z_mm) {
  const double x = x_mm * 1e-3, y = y_mm * 1e-3, z = z_mm * 1e-3;
  const double r2 = x * x + y * y + z * z;
  const double r5 = std::pow(r2, 2.5);
  const double c = 1e-7 * moment * 1e6;
  return {c * 3.0 * x * z / r5, c * 3.0 * y * z / r5, c * (3.0 * z * z - r2) / r5};
}

/// Mass of N(mu, sigma) on [lo, hi] by composite Simpson quadrature.
inline double gaussian_mass(double mu, double sigma, double lo, double hi, int n = 2000) {
  auto pdf = [&](double t) { return std::exp(-0.5 * (t - mu) * (t - mu) / (sigma * sigma)); };
  const double h = (hi - lo) / n;
  double s = pdf(lo) + pdf(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * pdf(lo + i * h);
  return s * h / 3.0;
}

/// First moment of N(mu, sigma) on [lo, hi], Simpson.
inline double gaussian_moment(double mu, double sigma, double lo, double hi, int n = 2000) {
  auto f = [&](double t) { return t * std::exp(-0.5 * (t - mu) * (t - mu) / (sigma * sigma)); };
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

/// Mean of the Gaussian truncated to [lo, hi] by quadrature.
inline double truncated_mean(double mu, double sigma, double lo, double hi) {
  return gaussian_moment(mu, sigma, lo, hi) / gaussian_mass(mu, sigma, lo, hi);
}

/// Direct causal convolution with a running window, naive sums.
inline std::vector<double> running_mean(const std::vector<double>& x, int window) {
  std::vector<double> y;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t start = i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
    double s = 0.0;
    for (std::size_t j = start; j <= i; ++j) s += x[j];
    y.push_back(s / static_cast<double>(i - start + 1));
  }
  return y;
}

inline Eigen::Vector3d cross(const Eigen::Vector3d& r, const Eigen::Vector3d& f) {
  return {r[1] * f[2] - r[2] * f[1], r[2] * f[0] - r[0] * f[2], r[0] * f[1] - r[1] * f[0]};
}

/// Closed-form OLS through normal equations.
inline std::pair<double, double> ols(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double k = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {k, (sy - k * sx) / n};
}

/// Rodrigues rotation, written out.
inline Eigen::Matrix3d rodrigues(Eigen::Vector3d axis, double angle) {
  axis.normalize();
  Eigen::Matrix3d k;
  k << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
  return Eigen::Matrix3d::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

}  // namespace oracle
