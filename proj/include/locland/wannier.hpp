#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "locland/errors.hpp"

namespace locland {

namespace wannier_detail {
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
}  // namespace wannier_detail

/// Projection of a Dirac mass at y onto torus frequencies |k| <= n, with an
/// optional diffusion weight exp(-k^2 t) per mode; t = 0 is the plain
/// Dirichlet kernel. Sampled on the uniform grid x_j = 2 pi j / M.
struct TorusProjection {
  int max_frequency = 0;  ///< n
  double time = 0.0;      ///< t, 0 for the direct projection
  double center = 0.0;    ///< y in [0, 2 pi)
  Eigen::VectorXd grid;
  Eigen::VectorXd samples;
};

/// Closed form sin((n + 1/2) u) / sin(u / 2) with the removable singularity
/// evaluated as 2n + 1.
inline double dirichlet_kernel(double u, int n) {
  const double denom = std::sin(0.5 * u);
  if (denom == 0.0) return static_cast<double>(2 * n + 1);
  return std::sin((n + 0.5) * u) / denom;
}

/// samples[j] = sum_{k=-n}^{n} e^{-k^2 t} cos(k (x_j - y)); the imaginary
/// parts of the +-k pair cancel, so the sum runs in real arithmetic.
/// grid_size 0 picks the default 16 (2n + 1).
inline TorusProjection project_dirac(int n, double t, double y,
                                     Eigen::Index grid_size = 0) {
  if (n < 0) throw InvalidInputError("project_dirac: n must be >= 0");
  if (t < 0.0) throw InvalidInputError("project_dirac: t must be >= 0");
  if (grid_size == 0) grid_size = 16 * (2 * static_cast<Eigen::Index>(n) + 1);
  if (grid_size <= 2 * static_cast<Eigen::Index>(n) + 1)
    throw InvalidInputError(
        "project_dirac: grid must have more than 2n+1 points, otherwise the "
        "top mode aliases");
  y = std::fmod(y, wannier_detail::kTwoPi);
  if (y < 0.0) y += wannier_detail::kTwoPi;

  TorusProjection out;
  out.max_frequency = n;
  out.time = t;
  out.center = y;
  out.grid.resize(grid_size);
  out.samples.resize(grid_size);

  std::vector<double> damping(n + 1);
  for (int k = 0; k <= n; ++k)
    damping[k] = std::exp(-static_cast<double>(k) * k * t);

  for (Eigen::Index j = 0; j < grid_size; ++j) {
    const double x =
        wannier_detail::kTwoPi * static_cast<double>(j) /
        static_cast<double>(grid_size);
    const double u = x - y;
    double acc = damping[0];
    for (int k = 1; k <= n; ++k) acc += 2.0 * damping[k] * std::cos(k * u);
    out.grid(j) = x;
    out.samples(j) = acc;
  }
  return out;
}

/// Rigorous sup-norm bound 2 sum_{k > n} e^{-k^2 t} on the distance between
/// the truncated diffused projection and the full theta function; summed
/// until terms vanish below 1e-300.
inline double theta_truncation_error(int n, double t) {
  if (n < 0) throw InvalidInputError("theta_truncation_error: n must be >= 0");
  if (!(t > 0.0))
    throw InvalidInputError(
        "theta_truncation_error: t must be positive (the tail diverges at "
        "t = 0)");
  double sum = 0.0;
  for (long long k = n + 1;; ++k) {
    const double term = std::exp(-static_cast<double>(k) *
                                 static_cast<double>(k) * t);
    if (term < 1e-300) break;
    sum += term;
  }
  return 2.0 * sum;
}

struct DecayMetrics {
  double core_mass = 0.0;  ///< fraction of squared mass within the core arc
  double tail_sup = 0.0;   ///< max |sample| outside the core arc
};

/// Splits the circle at arc-distance `radius` from the center and reports
/// how much squared mass the core holds versus the largest tail excursion.
inline DecayMetrics decay_metrics(const TorusProjection& projection,
                                  double radius) {
  if (!(radius > 0.0 && radius < wannier_detail::kPi))
    throw InvalidInputError("decay_metrics: radius must lie in (0, pi)");
  double total = 0.0;
  double core = 0.0;
  double tail = 0.0;
  for (Eigen::Index j = 0; j < projection.samples.size(); ++j) {
    const double value = projection.samples(j);
    const double arc = std::abs(std::remainder(
        projection.grid(j) - projection.center, wannier_detail::kTwoPi));
    total += value * value;
    if (arc <= radius)
      core += value * value;
    else
      tail = std::max(tail, std::abs(value));
  }
  return {core / total, tail};
}

}  // namespace locland
