#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace locland::rng {

/// Mixes (seed, index) into a fresh seed; splitmix64 finalizer.
inline std::uint64_t seed_mix(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic scalar stream over std::mt19937_64. The distributions are
/// spelled out here instead of taken from <random> so that a given seed
/// reproduces the same sequence on every platform and standard library.
class Stream {
public:
  explicit Stream(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform in [-1, 1).
  double uniform_symmetric() { return 2.0 * uniform01() - 1.0; }

  /// Standard normal via Box-Muller; the paired deviate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Independent stream for worker or chunk `index`.
  Stream substream(std::uint64_t index) const {
    return Stream(seed_mix(seed_, index));
  }

private:
  static constexpr double kPi = 3.14159265358979323846;
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// n i.i.d. standard normals.
inline Eigen::VectorXd normal_vector(Eigen::Index n, std::uint64_t seed) {
  Stream stream(seed);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = stream.normal();
  return v;
}

/// rows x cols block of i.i.d. standard normals, filled column by column.
inline Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols,
                                     std::uint64_t seed) {
  Stream stream(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = stream.normal();
  return m;
}

}  // namespace locland::rng
