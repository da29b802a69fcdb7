#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "locland/errors.hpp"
#include "locland/geometry.hpp"
#include "locland/parallel.hpp"
#include "locland/rng.hpp"

namespace locland {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Square linear operator with a matrix-free apply. Implementations are
/// immutable after construction and safe to share across threads.
class LinearOperator {
public:
  virtual ~LinearOperator() = default;

  Index dim() const { return dim_; }
  bool symmetric() const { return symmetric_; }
  virtual std::string kind() const = 0;

  /// y = A x.
  Vector apply(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != dim_)
      throw DimensionError("apply: operator dim " + std::to_string(dim_) +
                           " vs vector size " + std::to_string(x.size()));
    if (!x.allFinite())
      throw InvalidInputError("apply: input has non-finite entries");
    Vector y(dim_);
    do_apply(x, y);
    return y;
  }

  /// Column j of the result equals apply(column j of b). Columns may be
  /// evaluated concurrently; each column runs the exact scalar sequence of
  /// apply(), so serial and threaded results are identical.
  Matrix apply_block(const Eigen::Ref<const Matrix>& b, int threads = 1) const {
    if (b.rows() != dim_)
      throw DimensionError("apply_block: operator dim " +
                           std::to_string(dim_) + " vs block rows " +
                           std::to_string(b.rows()));
    if (!b.allFinite())
      throw InvalidInputError("apply_block: input has non-finite entries");
    Matrix out(dim_, b.cols());
    exec::parallel_for(b.cols(), threads, [&](std::int64_t j) {
      do_apply(b.col(j), out.col(j));
    });
    return out;
  }

  /// Dense image of the operator; column j is A e_j.
  Matrix to_dense(int threads = 1) const {
    return apply_block(Matrix::Identity(dim_, dim_), threads);
  }

  /// Cheap upper bound on the spectral radius, used when power iteration
  /// runs out of iterations. Default: Gershgorin row sums of the assembled
  /// matrix; concrete operators override with something cheaper.
  virtual double spectral_radius_bound() const {
    return to_dense().cwiseAbs().rowwise().sum().maxCoeff();
  }

protected:
  LinearOperator(Index dim, bool symmetric) : dim_(dim), symmetric_(symmetric) {
    if (dim < 1) throw InvalidInputError("operator: dimension must be >= 1");
  }

  virtual void do_apply(const Eigen::Ref<const Vector>& x,
                        Eigen::Ref<Vector> y) const = 0;

  /// Lets wrapper operators reach the unchecked kernel of another operator.
  static void apply_unchecked(const LinearOperator& op,
                              const Eigen::Ref<const Vector>& x,
                              Eigen::Ref<Vector> y) {
    op.do_apply(x, y);
  }

private:
  Index dim_;
  bool symmetric_;
};

/// Dense row-major storage. With symmetric=true the entries must satisfy
/// a(i,j) == a(j,i) exactly.
class DenseOperator final : public LinearOperator {
public:
  DenseOperator(Matrix a, bool symmetric)
      : LinearOperator(a.rows(), symmetric), a_(std::move(a)) {
    if (a_.rows() != a_.cols())
      throw InvalidInputError("dense operator: matrix must be square");
    if (!a_.allFinite())
      throw InvalidInputError("dense operator: non-finite entries");
    if (symmetric) {
      for (Index i = 0; i < a_.rows(); ++i)
        for (Index j = i + 1; j < a_.cols(); ++j)
          if (a_(i, j) != a_(j, i))
            throw InvalidInputError(
                "dense operator: declared symmetric but entry (" +
                std::to_string(i) + "," + std::to_string(j) +
                ") differs from its transpose");
    }
  }

  std::string kind() const override { return "dense"; }
  const Matrix& matrix() const { return a_; }

  double spectral_radius_bound() const override {
    return a_.cwiseAbs().rowwise().sum().maxCoeff();
  }

protected:
  void do_apply(const Eigen::Ref<const Vector>& x,
                Eigen::Ref<Vector> y) const override {
    y.noalias() = a_ * x;
  }

private:
  Matrix a_;
};

/// Band storage: diagonals(d, i) holds A(i, i + d - bandwidth). Slots that
/// fall outside the matrix must be zero.
class BandedOperator final : public LinearOperator {
public:
  BandedOperator(int bandwidth, Matrix diagonals, bool symmetric)
      : LinearOperator(diagonals.cols(), symmetric),
        bandwidth_(bandwidth),
        diags_(std::move(diagonals)) {
    if (bandwidth < 0)
      throw InvalidInputError("banded operator: negative bandwidth");
    if (diags_.rows() != 2 * bandwidth + 1)
      throw InvalidInputError(
          "banded operator: expected 2*bandwidth+1 diagonal rows");
    if (dim() < 2 * static_cast<Index>(bandwidth) + 1)
      throw InvalidInputError(
          "banded operator: dimension must be >= 2*bandwidth+1");
    if (!diags_.allFinite())
      throw InvalidInputError("banded operator: non-finite entries");
    const Index n = dim();
    for (Index i = 0; i < n; ++i)
      for (Index d = 0; d < diags_.rows(); ++d) {
        const Index j = i + d - bandwidth_;
        if ((j < 0 || j >= n) && diags_(d, i) != 0.0)
          throw InvalidInputError(
              "banded operator: nonzero entry outside the matrix");
        if (symmetric && j > i && at(i, j) != at(j, i))
          throw InvalidInputError(
              "banded operator: declared symmetric but entry (" +
              std::to_string(i) + "," + std::to_string(j) +
              ") differs from its transpose");
      }
  }

  static BandedOperator from_dense(const Matrix& a, int bandwidth,
                                   bool symmetric) {
    const Index n = a.rows();
    Matrix diags = Matrix::Zero(2 * bandwidth + 1, n);
    for (Index i = 0; i < n; ++i)
      for (Index d = 0; d < diags.rows(); ++d) {
        const Index j = i + d - bandwidth;
        if (j >= 0 && j < n) diags(d, i) = a(i, j);
      }
    return BandedOperator(bandwidth, std::move(diags), symmetric);
  }

  std::string kind() const override { return "banded"; }
  int bandwidth() const { return bandwidth_; }
  const Matrix& diagonals() const { return diags_; }

  double at(Index i, Index j) const {
    const Index d = j - i + bandwidth_;
    if (d < 0 || d >= diags_.rows()) return 0.0;
    return diags_(d, i);
  }

  double spectral_radius_bound() const override {
    double best = 0.0;
    for (Index i = 0; i < dim(); ++i) {
      double row = 0.0;
      for (Index d = 0; d < diags_.rows(); ++d) row += std::abs(diags_(d, i));
      best = std::max(best, row);
    }
    return best;
  }

protected:
  void do_apply(const Eigen::Ref<const Vector>& x,
                Eigen::Ref<Vector> y) const override {
    const Index n = dim();
    for (Index i = 0; i < n; ++i) {
      double acc = 0.0;
      const Index dlo = std::max<Index>(0, bandwidth_ - i);
      const Index dhi = std::min<Index>(2 * bandwidth_, n - 1 - i + bandwidth_);
      for (Index d = dlo; d <= dhi; ++d)
        acc += diags_(d, i) * x(i + d - bandwidth_);
      y(i) = acc;
    }
  }

private:
  int bandwidth_;
  Matrix diags_;
};

/// Pseudo-spectral operator on the periodic unit square: a real Fourier
/// multiplier ((2 pi)^2 |k|^2)^exponent over integer frequencies
/// k in [-s/2, s/2) per axis, plus a pointwise potential. Symmetric by
/// construction. Transforms are plain separable DFT matmuls; adequate at
/// the grid sizes this is meant for.
class SpectralCompositeOperator final : public LinearOperator {
public:
  static constexpr double kImaginaryTolerance = 1e-10;

  SpectralCompositeOperator(Index side, double exponent, Vector potential)
      : LinearOperator(side * side, true),
        side_(side),
        exponent_(exponent),
        potential_(std::move(potential)) {
    if (side < 1)
      throw InvalidInputError("spectral operator: side must be >= 1");
    if (!(exponent > 0))
      throw InvalidInputError("spectral operator: exponent must be positive");
    if (potential_.size() != dim())
      throw DimensionError("spectral operator: potential size " +
                           std::to_string(potential_.size()) +
                           " does not match side^2");
    if (!potential_.allFinite())
      throw InvalidInputError("spectral operator: non-finite potential");

    multiplier_.resize(side_, side_);
    for (Index p = 0; p < side_; ++p)
      for (Index q = 0; q < side_; ++q) {
        const double k1 = frequency(p, side_);
        const double k2 = frequency(q, side_);
        const double sym = 4.0 * kPi * kPi * (k1 * k1 + k2 * k2);
        multiplier_(p, q) = sym == 0.0 ? 0.0 : std::pow(sym, exponent_);
      }

    dft_.resize(side_, side_);
    const std::complex<double> unit(0.0, 1.0);
    for (Index k = 0; k < side_; ++k)
      for (Index x = 0; x < side_; ++x)
        dft_(k, x) = std::exp(-unit * (2.0 * kPi * static_cast<double>(k) *
                                       static_cast<double>(x) /
                                       static_cast<double>(side_)));
    idft_ = dft_.conjugate();
  }

  std::string kind() const override { return "spectral"; }
  Index side() const { return side_; }
  double exponent() const { return exponent_; }
  const Vector& potential() const { return potential_; }
  /// Multiplier per Fourier mode, row-major over (k1 index, k2 index).
  const Matrix& multiplier() const { return multiplier_; }
  GridGeometry geometry() const { return GridGeometry::torus(side_); }

  /// Integer frequency of mode index k: the range [-s/2, s/2).
  static double frequency(Index k, Index side) {
    return 2 * k < side ? static_cast<double>(k)
                        : static_cast<double>(k - side);
  }

  double spectral_radius_bound() const override {
    // ||M + diag(V)|| <= max multiplier + max |V|
    return multiplier_.maxCoeff() + potential_.cwiseAbs().maxCoeff();
  }

protected:
  void do_apply(const Eigen::Ref<const Vector>& x,
                Eigen::Ref<Vector> y) const override {
    using RowMajorMap = Eigen::Map<const Eigen::Matrix<
        double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
    RowMajorMap field(x.data(), side_, side_);
    ComplexMatrix hat = dft_ * field.cast<std::complex<double>>() *
                        dft_.transpose();
    hat.array() *= multiplier_.array();
    const ComplexMatrix back =
        (idft_ * hat * idft_.transpose()) /
        static_cast<double>(side_ * side_);
    const double residue = back.imag().cwiseAbs().maxCoeff();
    if (residue > kImaginaryTolerance)
      throw NumericError(
          "spectral apply: imaginary residue " + std::to_string(residue) +
          " exceeds tolerance; multiplier symmetry is broken");
    for (Index r = 0; r < side_; ++r)
      for (Index c = 0; c < side_; ++c)
        y(r * side_ + c) = back(r, c).real();
    y.array() += potential_.array() * x.array();
  }

private:
  static constexpr double kPi = 3.14159265358979323846;
  Index side_;
  double exponent_;
  Vector potential_;
  Matrix multiplier_;
  ComplexMatrix dft_;
  ComplexMatrix idft_;
};

/// v -> v - (A v)/norm. Eigenvalues map to 1 - lambda/norm, eigenvectors are
/// unchanged, so with norm >= ||A|| the low-lying spectrum of a positive
/// definite A moves to the spectral edge.
class FlippedOperator final : public LinearOperator {
public:
  FlippedOperator(std::shared_ptr<const LinearOperator> inner, double norm)
      : LinearOperator(inner ? inner->dim() : 1,
                       inner ? inner->symmetric() : false),
        inner_(std::move(inner)),
        norm_(norm) {
    if (!inner_) throw InvalidInputError("flipped operator: null inner");
    if (!(norm > 0.0))
      throw InvalidInputError("flipped operator: norm must be positive");
  }

  std::string kind() const override { return "flipped"; }
  const LinearOperator& inner() const { return *inner_; }
  double norm_estimate() const { return norm_; }

  double spectral_radius_bound() const override {
    return 1.0 + inner_->spectral_radius_bound() / norm_;
  }

protected:
  void do_apply(const Eigen::Ref<const Vector>& x,
                Eigen::Ref<Vector> y) const override {
    apply_unchecked(*inner_, x, y);
    y = x - y / norm_;
  }

private:
  std::shared_ptr<const LinearOperator> inner_;
  double norm_;
};

struct NormEstimate {
  double value = 0.0;
  bool used_fallback = false;
  int iterations = 0;
};

/// Spectral radius of a symmetric operator by power iteration. The estimate
/// sigma_j = ||A v_j|| increases monotonically to max |lambda|; convergence
/// is declared when the geometric tail estimate of the remaining gap falls
/// below tol * sigma. Hitting max_iter falls back to the row-sum bound,
/// flagged in the result.
inline NormEstimate estimate_norm(const LinearOperator& a, double tol = 1e-6,
                                  int max_iter = 1000,
                                  std::uint64_t seed = 0x6e72d1a5u) {
  if (!a.symmetric())
    throw InvalidInputError("estimate_norm: operator must be symmetric");
  if (!(tol > 0.0)) throw InvalidInputError("estimate_norm: tol must be > 0");
  if (max_iter < 1)
    throw InvalidInputError("estimate_norm: max_iter must be >= 1");

  Vector v = rng::normal_vector(a.dim(), seed);
  v /= v.norm();
  double sigma_prev = 0.0;
  double delta_prev = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    const Vector w = a.apply(v);
    const double sigma = w.norm();
    if (sigma == 0.0) return {0.0, false, it};
    const double delta = sigma - sigma_prev;
    if (it >= 2) {
      if (delta <= 0.0) return {sigma, false, it};  // stagnated at rounding
      if (delta_prev > 0.0) {
        const double q = delta / delta_prev;
        if (q < 1.0 && delta * q / (1.0 - q) <= tol * sigma)
          return {sigma, false, it};
      }
    }
    v = w / sigma;
    sigma_prev = sigma;
    delta_prev = delta;
  }
  return {a.spectral_radius_bound(), true, max_iter};
}

/// Wraps a symmetric operator as Id - A/norm; norm must dominate ||A||.
inline std::shared_ptr<const FlippedOperator> flip_spectrum(
    std::shared_ptr<const LinearOperator> a, double norm) {
  if (!a) throw InvalidInputError("flip_spectrum: null operator");
  if (!a->symmetric())
    throw InvalidInputError("flip_spectrum: operator must be symmetric");
  return std::make_shared<FlippedOperator>(std::move(a), norm);
}

}  // namespace locland
