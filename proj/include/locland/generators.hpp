#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "locland/operators.hpp"
#include "locland/rng.hpp"

namespace locland {

inline constexpr double kPiValue = 3.14159265358979323846;

/// A = B + B^T where B has i.i.d. uniform [-1, 1) entries inside the band
/// and zeros outside; exactly symmetric and exactly banded. Entries of B are
/// drawn row-major over the in-band positions, so a seed pins the matrix.
inline std::shared_ptr<BandedOperator> random_band_matrix(Index n,
                                                          int bandwidth,
                                                          std::uint64_t seed) {
  if (bandwidth < 0)
    throw InvalidInputError("random_band_matrix: negative bandwidth");
  if (n < 2 * static_cast<Index>(bandwidth) + 1)
    throw InvalidInputError(
        "random_band_matrix: need n >= 2*bandwidth+1 (bandwidth " +
        std::to_string(bandwidth) + " too wide for n " + std::to_string(n) +
        ")");

  rng::Stream stream(seed);
  const Index rows = 2 * bandwidth + 1;
  Matrix b = Matrix::Zero(rows, n);  // b(d, i) = B(i, i + d - bandwidth)
  for (Index i = 0; i < n; ++i)
    for (Index d = 0; d < rows; ++d) {
      const Index j = i + d - bandwidth;
      if (j >= 0 && j < n) b(d, i) = stream.uniform_symmetric();
    }

  Matrix diags = Matrix::Zero(rows, n);
  for (Index i = 0; i < n; ++i)
    for (Index d = 0; d < rows; ++d) {
      const Index j = i + d - bandwidth;
      if (j < 0 || j >= n) continue;
      // A(i, j) = B(i, j) + B(j, i)
      diags(d, i) = b(d, i) + b(2 * bandwidth - d, j);
    }
  return std::make_shared<BandedOperator>(bandwidth, std::move(diags), true);
}

/// Band-limited smooth random potential on the periodic s x s grid.
struct PotentialSpec {
  Index grid_side = 48;
  int cutoff = 8;             ///< max Fourier mode per axis
  double decay_sigma = 1.0;   ///< mode-amplitude decay scale
  double amplitude = 1000.0;  ///< max V after rescaling
  std::uint64_t seed = 1;
};

struct Potential {
  Vector values;  ///< row-major s x s
  bool degenerate = false;  ///< field was constant; returned as all zeros
};

/// V(x) = Re sum_{|k|_inf <= K} c_k e^{2 pi i k.x} with c_k complex Gaussian
/// of standard deviation exp(-|k|^2 / (2 sigma^2)) and c_{-k} = conj(c_k),
/// evaluated on the grid and rescaled affinely to [0, amplitude]. Modes are
/// drawn in a fixed half-plane order (k1 ascending, then k2), one stream.
inline Potential random_potential(const PotentialSpec& spec) {
  const Index s = spec.grid_side;
  const int cutoff = spec.cutoff;
  if (s < 1) throw InvalidInputError("random_potential: grid side must be >= 1");
  if (cutoff < 0)
    throw InvalidInputError("random_potential: negative cutoff");
  if (2 * static_cast<Index>(cutoff) >= s)
    throw InvalidInputError(
        "random_potential: cutoff must satisfy K < s/2 (aliasing)");
  if (!(spec.decay_sigma > 0.0))
    throw InvalidInputError("random_potential: decay sigma must be > 0");
  if (!(spec.amplitude >= 0.0))
    throw InvalidInputError("random_potential: negative amplitude");

  rng::Stream stream(spec.seed);
  using Complex = std::complex<double>;
  const int span = 2 * cutoff + 1;
  Eigen::MatrixXcd coeff = Eigen::MatrixXcd::Zero(span, span);
  auto slot = [&](int k1, int k2) -> Complex& {
    return coeff(k1 + cutoff, k2 + cutoff);
  };
  for (int k1 = 0; k1 <= cutoff; ++k1) {
    const int k2_begin = k1 == 0 ? 0 : -cutoff;
    for (int k2 = k2_begin; k2 <= cutoff; ++k2) {
      const double sd = std::exp(-(k1 * k1 + k2 * k2) /
                                 (2.0 * spec.decay_sigma * spec.decay_sigma));
      if (k1 == 0 && k2 == 0) {
        slot(0, 0) = Complex(sd * stream.normal(), 0.0);
      } else {
        const Complex c(sd * stream.normal(), sd * stream.normal());
        slot(k1, k2) = c;
        slot(-k1, -k2) = std::conj(c);
      }
    }
  }

  // per-axis phase tables e^{2 pi i k r / s}
  Eigen::MatrixXcd phase(span, s);
  const Complex unit(0.0, 1.0);
  for (int k = -cutoff; k <= cutoff; ++k)
    for (Index r = 0; r < s; ++r)
      phase(k + cutoff, r) =
          std::exp(unit * (2.0 * kPiValue * k * static_cast<double>(r) /
                           static_cast<double>(s)));

  Vector field(s * s);
  double max_imag = 0.0;
  for (Index r = 0; r < s; ++r)
    for (Index c = 0; c < s; ++c) {
      Complex acc(0.0, 0.0);
      for (int k1 = -cutoff; k1 <= cutoff; ++k1)
        for (int k2 = -cutoff; k2 <= cutoff; ++k2)
          acc += slot(k1, k2) * phase(k1 + cutoff, r) * phase(k2 + cutoff, c);
      max_imag = std::max(max_imag, std::abs(acc.imag()));
      field(r * s + c) = acc.real();
    }
  if (max_imag > 1e-12)
    throw NumericError(
        "random_potential: conjugate symmetry broken, imaginary residue " +
        std::to_string(max_imag));

  const double lo = field.minCoeff();
  const double hi = field.maxCoeff();
  if (hi - lo <= 0.0) return {Vector::Zero(s * s), true};
  Potential out;
  out.values = ((field.array() - lo) / (hi - lo) * spec.amplitude).matrix();
  return out;
}

/// (-Laplacian)^exponent + V on the periodic unit square, pseudo-spectral
/// with mesh 1/s; exponent 1 is the standard Schroedinger operator.
inline std::shared_ptr<SpectralCompositeOperator> schrodinger_operator(
    const Vector& potential, double exponent) {
  const auto side = static_cast<Index>(std::llround(
      std::sqrt(static_cast<double>(potential.size()))));
  if (side * side != potential.size())
    throw InvalidInputError("schrodinger_operator: potential grid is not "
                            "square");
  return std::make_shared<SpectralCompositeOperator>(side, exponent,
                                                     potential);
}

/// Block-diagonal test matrix with a prescribed dominant eigenvalue per
/// block plus optional coupling noise across blocks.
struct TheoremBlock {
  Index size = 0;
  double edge_eigenvalue = 0.0;
};

struct TheoremMatrixSpec {
  std::vector<TheoremBlock> blocks;
  double coupling = 0.0;
  std::uint64_t seed = 0;
};

/// Each block is a localized rank-one spike edge * v v^T (v an exponential
/// profile at the block center) plus small interior noise, rescaled so the
/// block's dominant eigenvalue equals the requested edge exactly. With
/// coupling zero the eigenvectors are exactly block-supported; coupling
/// adds symmetric uniform noise scaled by the coupling across the whole
/// matrix.
inline std::shared_ptr<DenseOperator> theorem_test_matrix(
    const TheoremMatrixSpec& spec) {
  if (spec.blocks.empty())
    throw InvalidInputError("theorem_test_matrix: no blocks");
  if (spec.coupling < 0.0)
    throw InvalidInputError("theorem_test_matrix: negative coupling");
  Index n = 0;
  double min_edge = std::numeric_limits<double>::infinity();
  for (const auto& block : spec.blocks) {
    if (block.size < 1)
      throw InvalidInputError("theorem_test_matrix: block size must be >= 1");
    if (block.edge_eigenvalue == 0.0)
      throw InvalidInputError("theorem_test_matrix: zero edge eigenvalue");
    n += block.size;
    min_edge = std::min(min_edge, std::abs(block.edge_eigenvalue));
  }
  if (spec.coupling == 0.0) {
    std::set<double> magnitudes;
    for (const auto& block : spec.blocks)
      if (!magnitudes.insert(std::abs(block.edge_eigenvalue)).second)
        throw InvalidInputError(
            "theorem_test_matrix: duplicate edge eigenvalues need nonzero "
            "coupling (degenerate gap must be requested explicitly)");
  }

  rng::Stream stream(spec.seed);
  Matrix a = Matrix::Zero(n, n);
  Index offset = 0;
  for (const auto& block : spec.blocks) {
    const Index size = block.size;
    Vector profile(size);
    const double center = (size - 1) / 2.0;
    for (Index i = 0; i < size; ++i)
      profile(i) = std::exp(-std::abs(i - center));
    profile /= profile.norm();

    // outer product first, scalar after: keeps body(i,j) == body(j,i) bitwise
    Matrix body = profile * profile.transpose();
    body *= block.edge_eigenvalue;
    if (size > 1) {
      // interior noise well below every edge: spectral radius ~ 5% of the
      // smallest edge by the semicircle scaling of symmetric uniform noise
      const double scale =
          0.05 * min_edge / (1.155 * std::sqrt(static_cast<double>(size)));
      for (Index i = 0; i < size; ++i)
        for (Index j = i; j < size; ++j) {
          const double v = scale * stream.uniform_symmetric();
          body(i, j) += v;
          if (j != i) body(j, i) += v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(body,
                                                 Eigen::EigenvaluesOnly);
    const double radius = solver.eigenvalues().cwiseAbs().maxCoeff();
    body *= std::abs(block.edge_eigenvalue) / radius;
    a.block(offset, offset, size, size) = body;
    offset += size;
  }

  if (spec.coupling > 0.0) {
    for (Index i = 0; i < n; ++i)
      for (Index j = i; j < n; ++j) {
        const double w = spec.coupling * stream.uniform_symmetric();
        a(i, j) += w;
        if (j != i) a(j, i) += w;
      }
  }
  return std::make_shared<DenseOperator>(std::move(a), true);
}

}  // namespace locland
