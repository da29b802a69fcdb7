#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "locland/operators.hpp"

namespace locland {

/// Eigenpairs of a symmetric operator, sorted by descending |lambda|.
/// Eigenvector columns are aligned with the eigenvalues and sign-normalized
/// so the entry of largest magnitude is positive.
struct Spectrum {
  Vector eigenvalues;
  Matrix eigenvectors;

  Index dim() const { return eigenvalues.size(); }
};

struct EigOptions {
  enum class Backend { Auto, Jacobi, Tridiagonal };
  Backend backend = Backend::Auto;
  Index jacobi_limit = 256;  ///< Auto picks Jacobi up to here
  int max_sweeps = 30;
  Index dense_limit = 4096;
  int threads = 1;  ///< used when assembling matrix-free operators
};

namespace detail {

/// Cyclic Jacobi with a fixed off-diagonal threshold of 1e-12 ||A||_F.
/// On return a is diagonal (eigenvalues) and v holds the eigenvectors.
inline void jacobi_eig_in_place(Matrix& a, Matrix& v, int max_sweeps) {
  const Index n = a.rows();
  v = Matrix::Identity(n, n);
  const double threshold = 1e-12 * a.norm();
  if (threshold == 0.0) return;  // zero matrix

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= threshold) continue;
        rotated = true;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        const double root = std::sqrt(1.0 + tau * tau);
        const double t = tau >= 0.0 ? 1.0 / (tau + root) : 1.0 / (tau - root);
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        const Vector rowp = a.row(p);
        const Vector rowq = a.row(q);
        a.row(p) = c * rowp - s * rowq;
        a.row(q) = s * rowp + c * rowq;
        const Vector colp = a.col(p);
        const Vector colq = a.col(q);
        a.col(p) = c * colp - s * colq;
        a.col(q) = s * colp + c * colq;
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        const Vector vp = v.col(p);
        const Vector vq = v.col(q);
        v.col(p) = c * vp - s * vq;
        v.col(q) = s * vp + c * vq;
      }
    }
    if (!rotated) return;
  }

  double residual = 0.0;
  for (Index p = 0; p < n - 1; ++p)
    for (Index q = p + 1; q < n; ++q)
      residual = std::max(residual, std::abs(a(p, q)));
  throw NumericError("jacobi: no convergence within " +
                     std::to_string(max_sweeps) +
                     " sweeps; max off-diagonal " + std::to_string(residual));
}

/// Sorts by descending |lambda| (stable) and fixes eigenvector signs.
inline Spectrum finalize_spectrum(const Vector& evals, const Matrix& evecs) {
  const Index n = evals.size();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(evals(a)) > std::abs(evals(b));
  });

  Spectrum s;
  s.eigenvalues.resize(n);
  s.eigenvectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    s.eigenvalues(j) = evals(order[j]);
    s.eigenvectors.col(j) = evecs.col(order[j]);
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < n; ++i) {
      const double m = std::abs(s.eigenvectors(i, j));
      if (m > best) {
        best = m;
        arg = i;
      }
    }
    if (s.eigenvectors(arg, j) < 0.0) s.eigenvectors.col(j) *= -1.0;
  }
  return s;
}

}  // namespace detail

/// Full symmetric eigendecomposition of a dense matrix. Small problems run
/// the in-house cyclic Jacobi; larger ones use Eigen's tridiagonal solver.
/// Input asymmetry beyond 1e-12 ||a||_F is rejected; anything below is
/// symmetrized away (matrix-free assembly leaves rounding-level residue).
inline Spectrum eig_symmetric(Matrix a, const EigOptions& options = {}) {
  if (a.rows() != a.cols())
    throw InvalidInputError("eig_symmetric: matrix must be square");
  const Index n = a.rows();
  if (n > options.dense_limit)
    throw InvalidInputError("eig_symmetric: dimension " + std::to_string(n) +
                            " exceeds dense limit " +
                            std::to_string(options.dense_limit));
  const double fro = a.norm();
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(fro, 1.0))
    throw InvalidInputError("eig_symmetric: input is not symmetric (residue " +
                            std::to_string(asym) + ")");
  if (asym > 0.0) a = ((a + a.transpose()) * 0.5).eval();

  auto backend = options.backend;
  if (backend == EigOptions::Backend::Auto)
    backend = n <= options.jacobi_limit ? EigOptions::Backend::Jacobi
                                        : EigOptions::Backend::Tridiagonal;

  if (backend == EigOptions::Backend::Jacobi) {
    Matrix v;
    detail::jacobi_eig_in_place(a, v, options.max_sweeps);
    return detail::finalize_spectrum(a.diagonal(), v);
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success)
    throw NumericError("eig_symmetric: tridiagonal solver did not converge");
  return detail::finalize_spectrum(solver.eigenvalues(),
                                   solver.eigenvectors());
}

inline Spectrum eig_symmetric(const LinearOperator& a,
                              const EigOptions& options = {}) {
  if (!a.symmetric())
    throw InvalidInputError("eig_symmetric: operator must be symmetric");
  if (a.dim() > options.dense_limit)
    throw InvalidInputError("eig_symmetric: dimension " +
                            std::to_string(a.dim()) + " exceeds dense limit " +
                            std::to_string(options.dense_limit));
  if (const auto* dense = dynamic_cast<const DenseOperator*>(&a))
    return eig_symmetric(dense->matrix(), options);
  return eig_symmetric(a.to_dense(options.threads), options);
}

}  // namespace locland
