#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include "locland/eig.hpp"
#include "locland/geometry.hpp"
#include "locland/operators.hpp"
#include "locland/parallel.hpp"
#include "locland/rng.hpp"

namespace locland {

namespace detail {

/// log(e^a + e^b) without overflow; handles -inf terms.
inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace detail

enum class LandscapeMode { Exact, Randomized, Semigroup };

inline std::string to_string(LandscapeMode mode) {
  switch (mode) {
    case LandscapeMode::Exact: return "exact";
    case LandscapeMode::Randomized: return "randomized";
    case LandscapeMode::Semigroup: return "semigroup";
  }
  return "exact";
}

/// Per-index landscape values on natural-log scale, with the parameters that
/// produced them. Values are finite by contract; a vanishing iterate is an
/// error upstream, never a -inf here.
struct Landscape {
  Vector values;
  int alpha = 0;
  LandscapeMode mode = LandscapeMode::Exact;
  int sketch_columns = 0;     ///< m, randomized mode only
  std::uint64_t seed = 0;     ///< sketch seed, randomized mode only
  double time = 0.0;          ///< diffusion time, semigroup mode only
  GridGeometry geometry;
};

/// n x m block of i.i.d. standard normals. Entries are drawn column by
/// column from one seeded stream, so a seed reproduces the block bitwise.
struct RandomSketch {
  Matrix columns;
  std::uint64_t seed = 0;

  Index rows() const { return columns.rows(); }
  Index cols() const { return columns.cols(); }

  static RandomSketch gaussian(Index n, Index m, std::uint64_t seed) {
    if (n < 1 || m < 1)
      throw InvalidInputError("sketch: rows and columns must be >= 1");
    return {rng::normal_matrix(n, m, seed), seed};
  }
};

/// Normalized iterate A^alpha e_k / ||A^alpha e_k||. Each step renormalizes
/// and accumulates the log norm into *log_norm, so nothing overflows no
/// matter how large ||A||^alpha gets.
inline Vector power_iterate(const LinearOperator& a, Index k, int alpha,
                            double* log_norm = nullptr) {
  if (alpha < 0) throw InvalidInputError("power_iterate: alpha must be >= 0");
  if (k < 0 || k >= a.dim())
    throw InvalidInputError("power_iterate: column index out of range");
  Vector v = Vector::Zero(a.dim());
  v(k) = 1.0;
  double acc = 0.0;
  for (int step = 1; step <= alpha; ++step) {
    v = a.apply(v);
    const double nrm = v.norm();
    if (nrm == 0.0)
      throw NumericError("landscape: A^" + std::to_string(step) + " e_" +
                         std::to_string(k) +
                         " vanished exactly; log undefined at column " +
                         std::to_string(k));
    acc += std::log(nrm);
    v /= nrm;
  }
  if (log_norm) *log_norm = acc;
  return v;
}

/// values[k] = log ||A^alpha e_k||, one independent power iteration per
/// column. Columns are embarrassingly parallel and written disjointly, so
/// the result does not depend on the thread count.
inline Landscape landscape_exact(const LinearOperator& a, int alpha,
                                 const GridGeometry& geometry,
                                 int threads = 1) {
  if (alpha < 0)
    throw InvalidInputError("landscape_exact: alpha must be >= 0");
  if (geometry.size() != a.dim())
    throw DimensionError("landscape_exact: geometry size " +
                         std::to_string(geometry.size()) +
                         " does not match operator dim " +
                         std::to_string(a.dim()));
  Landscape out;
  out.values = Vector::Zero(a.dim());
  out.alpha = alpha;
  out.mode = LandscapeMode::Exact;
  out.geometry = geometry;
  if (alpha == 0) return out;
  exec::parallel_for(a.dim(), threads, [&](std::int64_t k) {
    double acc = 0.0;
    power_iterate(a, k, alpha, &acc);
    out.values(k) = acc;
  });
  return out;
}

/// values[k] = log ||e_k^T A^alpha R||, computed with alpha block applies
/// and a per-step global renormalization by the largest column norm. Needs
/// a symmetric operator: rows of A^alpha R are then reachable by forward
/// applies. Cost is alpha*m applies instead of alpha*n.
inline Landscape landscape_randomized(const LinearOperator& a, int alpha,
                                      const RandomSketch& sketch,
                                      const GridGeometry& geometry,
                                      int threads = 1) {
  if (!a.symmetric())
    throw InvalidInputError(
        "landscape_randomized: operator must be symmetric");
  if (alpha < 0)
    throw InvalidInputError("landscape_randomized: alpha must be >= 0");
  if (sketch.rows() != a.dim())
    throw DimensionError("landscape_randomized: sketch rows " +
                         std::to_string(sketch.rows()) +
                         " do not match operator dim " +
                         std::to_string(a.dim()));
  if (sketch.cols() < 1)
    throw InvalidInputError("landscape_randomized: empty sketch");
  if (geometry.size() != a.dim())
    throw DimensionError("landscape_randomized: geometry mismatch");

  Matrix block = sketch.columns;
  double acc = 0.0;
  for (int step = 1; step <= alpha; ++step) {
    block = a.apply_block(block, threads);
    const double scale = block.colwise().norm().maxCoeff();
    if (scale == 0.0)
      throw NumericError("landscape_randomized: block collapsed to zero at "
                         "step " +
                         std::to_string(step));
    block /= scale;
    acc += std::log(scale);
  }

  Landscape out;
  out.values.resize(a.dim());
  out.alpha = alpha;
  out.mode = LandscapeMode::Randomized;
  out.sketch_columns = static_cast<int>(sketch.cols());
  out.seed = sketch.seed;
  out.geometry = geometry;
  for (Index k = 0; k < a.dim(); ++k) {
    const double row_norm = block.row(k).norm();
    if (row_norm == 0.0)
      throw NumericError("landscape_randomized: row " + std::to_string(k) +
                         " of the sketched block vanished; log undefined");
    out.values(k) = std::log(row_norm) + acc;
  }
  return out;
}

/// values[k] = log ||exp(-tA) e_k|| through the full eigendecomposition:
/// verification-grade only, dimension capped by the dense-oracle limit.
inline Landscape landscape_semigroup(const LinearOperator& a, double t,
                                     const GridGeometry& geometry,
                                     const EigOptions& eig_options = {}) {
  if (!a.symmetric())
    throw InvalidInputError("landscape_semigroup: operator must be symmetric");
  if (t < 0.0)
    throw InvalidInputError("landscape_semigroup: time must be >= 0");
  if (geometry.size() != a.dim())
    throw DimensionError("landscape_semigroup: geometry mismatch");

  const Spectrum s = eig_symmetric(a, eig_options);
  const Index n = a.dim();
  Landscape out;
  out.values.resize(n);
  out.mode = LandscapeMode::Semigroup;
  out.time = t;
  out.geometry = geometry;
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < n; ++k) {
    // 0.5 * log sum_i exp(-2 t lambda_i) phi_{i,k}^2, log-sum-exp form
    double peak = kNegInf;
    for (Index i = 0; i < n; ++i) {
      const double phi = s.eigenvectors(k, i);
      if (phi == 0.0) continue;
      peak = std::max(peak, -2.0 * t * s.eigenvalues(i) +
                                2.0 * std::log(std::abs(phi)));
    }
    if (peak == kNegInf)
      throw NumericError("landscape_semigroup: basis column " +
                         std::to_string(k) +
                         " has no overlap with any eigenvector");
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double phi = s.eigenvectors(k, i);
      if (phi == 0.0) continue;
      sum += std::exp(-2.0 * t * s.eigenvalues(i) +
                      2.0 * std::log(std::abs(phi)) - peak);
    }
    out.values(k) = 0.5 * (peak + std::log(sum));
  }
  return out;
}

}  // namespace locland
