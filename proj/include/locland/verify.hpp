#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "locland/detect.hpp"
#include "locland/eig.hpp"
#include "locland/landscape.hpp"

namespace locland {

/// Smallest geometry ball around an eigenvector's argmax holding at least
/// half of its squared mass.
struct HalfMassRegion {
  Index center = 0;
  int radius = 0;
  std::vector<Index> indices;
};

/// Localization data certified from a spectrum: half-mass regions for the
/// first k eigenvectors, their largest size J, and the tightest uniform
/// exponential decay rate beta that holds pointwise for every (m, i).
/// beta equal to the cap means every off-region overlap was exactly zero;
/// beta zero certifies nothing but is still valid.
struct LocalizationProfile {
  std::vector<HalfMassRegion> regions;
  Index half_mass_max = 1;  ///< J
  double beta = 0.0;
  double beta_cap = 700.0;
  int k = 0;
  GridGeometry geometry;
};

inline int region_distance(const GridGeometry& geometry, Index m,
                           const HalfMassRegion& region) {
  return geometry.ball_distance(m, region.center, region.radius);
}

inline int union_distance(const GridGeometry& geometry, Index m,
                          const std::vector<HalfMassRegion>& regions) {
  int best = std::numeric_limits<int>::max();
  for (const auto& region : regions)
    best = std::min(best, region_distance(geometry, m, region));
  return best;
}

inline LocalizationProfile fit_profile(const Spectrum& spectrum, int k,
                                       const GridGeometry& geometry,
                                       double beta_cap = 700.0) {
  const Index n = spectrum.dim();
  if (k < 1 || k >= n)
    throw InvalidInputError("fit_profile: need 1 <= k < n");
  if (geometry.size() != n)
    throw DimensionError("fit_profile: geometry size mismatch");

  LocalizationProfile profile;
  profile.k = k;
  profile.geometry = geometry;
  profile.beta_cap = beta_cap;
  profile.half_mass_max = 1;

  for (int i = 0; i < k; ++i) {
    const auto phi = spectrum.eigenvectors.col(i);
    Index center = 0;
    double best = -1.0;
    for (Index m = 0; m < n; ++m) {
      const double mag = std::abs(phi(m));
      if (mag > best) {
        best = mag;
        center = m;
      }
    }
    HalfMassRegion region;
    region.center = center;
    for (int radius = 0;; ++radius) {
      auto ball = geometry.ball(center, radius);
      double mass = 0.0;
      for (Index m : ball) mass += phi(m) * phi(m);
      if (mass >= 0.5 || static_cast<Index>(ball.size()) == n) {
        region.radius = radius;
        region.indices = std::move(ball);
        break;
      }
    }
    profile.half_mass_max = std::max(
        profile.half_mass_max, static_cast<Index>(region.indices.size()));
    profile.regions.push_back(std::move(region));
  }

  // beta: min over i and m outside J_i of -log|phi_i(m)| / dist(m, J_i);
  // exact-zero overlaps hit the cap instead of infinity.
  double beta = beta_cap;
  for (int i = 0; i < k; ++i) {
    const auto phi = spectrum.eigenvectors.col(i);
    const auto& region = profile.regions[i];
    for (Index m = 0; m < n; ++m) {
      const int d = region_distance(geometry, m, region);
      if (d == 0) continue;
      const double mag = std::abs(phi(m));
      const double candidate =
          mag == 0.0 ? beta_cap : -std::log(mag) / static_cast<double>(d);
      beta = std::min(beta, candidate);
    }
  }
  profile.beta = std::max(0.0, std::min(beta, beta_cap));
  return profile;
}

/// Everything the theorem checker concluded about one (A, k, alpha) triple.
struct LocalizationReport {
  LocalizationProfile profile;
  int k = 0;
  int alpha = 0;
  double gap_ratio = 0.0;  ///< |lambda_k| / |lambda_{k+1}|
  bool alpha_condition_met = false;
  double threshold_y = 0.0;
  double min_peak_over_regions = 0.0;
  bool conclusion1_holds = false;
  int max_violation_distance = 0;
  double theorem_bound_distance = 0.0;
  bool conclusion2_holds = false;
  std::vector<Region> regions;  ///< superlevel components at y - 1
};

/// Oracle data the theorem checker consumes; exposed so callers can reuse
/// the spectrum, profile and landscape for further checks.
struct TheoremInputs {
  Spectrum spectrum;
  LocalizationProfile profile;
  Landscape landscape;
};

inline TheoremInputs prepare_theorem_inputs(const LinearOperator& a, int k,
                                            int alpha,
                                            const GridGeometry& geometry,
                                            int threads = 1,
                                            const EigOptions& eig_options = {}) {
  TheoremInputs inputs;
  inputs.spectrum = eig_symmetric(a, eig_options);
  inputs.profile = fit_profile(inputs.spectrum, k, geometry);
  inputs.landscape = landscape_exact(a, alpha, geometry, threads);
  return inputs;
}

namespace detail {

/// a >= b up to a relative slack that absorbs landscape rounding.
inline bool ge_with_slack(double a, double b) {
  return a >= b - 1e-9 * std::max(1.0, std::abs(b));
}

}  // namespace detail

/// Checks the localization guarantee: with gap_ratio^alpha >= 16 sqrt(J n)
/// there is a level y with (1) every half-mass region reaching y and
/// (2) every index with landscape >= y - 1 within an explicit distance of
/// the regions. Conclusions are evaluated unconditionally; the hypothesis
/// flag says whether the guarantee promises them.
inline LocalizationReport check_theorem(const TheoremInputs& inputs,
                                        int alpha) {
  const Spectrum& spectrum = inputs.spectrum;
  const LocalizationProfile& profile = inputs.profile;
  const Landscape& landscape = inputs.landscape;
  const int k = profile.k;
  const Index n = spectrum.dim();
  const GridGeometry& geometry = profile.geometry;

  const double abs_k = std::abs(spectrum.eigenvalues(k - 1));
  const double abs_k1 = std::abs(spectrum.eigenvalues(k));
  if (abs_k1 == 0.0)
    throw NumericError("check_theorem: |lambda_{k+1}| is zero, gap ratio "
                       "undefined");

  LocalizationReport report;
  report.profile = profile;
  report.k = k;
  report.alpha = alpha;
  report.gap_ratio = abs_k / abs_k1;

  const double j_max = static_cast<double>(profile.half_mass_max);
  // gap_ratio^alpha >= 16 sqrt(J n), compared in logs to dodge overflow
  report.alpha_condition_met =
      alpha * std::log(report.gap_ratio) >=
      std::log(16.0 * std::sqrt(j_max * static_cast<double>(n)));

  report.threshold_y =
      alpha * std::log(abs_k) - std::log(2.0 * std::sqrt(j_max));

  double min_peak = std::numeric_limits<double>::infinity();
  for (const auto& region : profile.regions) {
    double peak = -std::numeric_limits<double>::infinity();
    for (Index m : region.indices)
      peak = std::max(peak, landscape.values(m));
    min_peak = std::min(min_peak, peak);
  }
  report.min_peak_over_regions = min_peak;
  report.conclusion1_holds = detail::ge_with_slack(min_peak,
                                                   report.threshold_y);

  const double abs_1 = std::abs(spectrum.eigenvalues(0));
  report.theorem_bound_distance =
      (std::log(16.0 * std::sqrt(static_cast<double>(k)) *
                std::sqrt(j_max)) +
       alpha * std::log(abs_1 / abs_k)) /
      profile.beta;

  int worst = 0;
  const double cut = report.threshold_y - 1.0;
  for (Index m = 0; m < n; ++m) {
    if (!detail::ge_with_slack(landscape.values(m), cut)) continue;
    worst = std::max(worst, union_distance(geometry, m, profile.regions));
  }
  report.max_violation_distance = worst;
  report.conclusion2_holds =
      detail::ge_with_slack(report.theorem_bound_distance,
                            static_cast<double>(worst));

  report.regions = superlevel_regions(landscape, cut);
  return report;
}

inline LocalizationReport check_theorem(const LinearOperator& a, int k,
                                        int alpha,
                                        const GridGeometry& geometry,
                                        int threads = 1,
                                        const EigOptions& eig_options = {}) {
  return check_theorem(
      prepare_theorem_inputs(a, k, alpha, geometry, threads, eig_options),
      alpha);
}

struct InequalityResult {
  bool holds = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  Index worst_index = -1;  ///< eigenvector index for (a)/(b), grid index for (c)
};

/// Per-inequality outcome of the proof sweep; margins are slack in the
/// stated direction, so negative means violated.
struct ProofInequalityReport {
  InequalityResult witness;          ///< (a) some x in J_i has |phi_i(x)| >= 1/(2 sqrt J)
  InequalityResult landscape_lower;  ///< (b) f(x) >= alpha log|lambda_i| - log(2 sqrt J)
  InequalityResult landscape_upper;  ///< (c) f(m) <= log(e^{-beta d} sqrt(k) |l1|^a + sqrt(n) |l_{k+1}|^a)

  bool all_hold() const {
    return witness.holds && landscape_lower.holds && landscape_upper.holds;
  }
};

namespace detail {

inline double log_pow_abs(double value, int alpha) {
  const double mag = std::abs(value);
  if (mag > 0.0) return alpha * std::log(mag);
  return alpha == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Sweeps the two-sided landscape estimates behind the theorem over every
/// index, in log-safe arithmetic. The landscape must come from the same
/// operator and alpha as the spectrum.
inline ProofInequalityReport check_proof_inequalities(
    const Spectrum& spectrum, const LocalizationProfile& profile, int alpha,
    const Landscape& landscape) {
  const Index n = spectrum.dim();
  const int k = profile.k;
  if (landscape.values.size() != n)
    throw DimensionError("check_proof_inequalities: landscape size mismatch");

  ProofInequalityReport report;
  const double j_max = static_cast<double>(profile.half_mass_max);
  const double log_2sqrt_j = std::log(2.0 * std::sqrt(j_max));
  constexpr double kTol = 1e-9;

  auto update = [](InequalityResult& r, double margin, Index index) {
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.worst_index = index;
    }
    if (margin < -kTol) r.holds = false;
  };

  for (int i = 0; i < k; ++i) {
    const auto phi = spectrum.eigenvectors.col(i);
    const auto& region = profile.regions[i];
    Index witness = region.indices.front();
    double best = -1.0;
    for (Index m : region.indices) {
      const double mag = std::abs(phi(m));
      if (mag > best) {
        best = mag;
        witness = m;
      }
    }
    update(report.witness, best - 0.5 / std::sqrt(j_max), i);

    const double lower =
        detail::log_pow_abs(spectrum.eigenvalues(i), alpha) - log_2sqrt_j;
    update(report.landscape_lower, landscape.values(witness) - lower, i);
  }

  const double log_edge =
      detail::log_pow_abs(spectrum.eigenvalues(0), alpha) +
      0.5 * std::log(static_cast<double>(k));
  const double log_bulk =
      detail::log_pow_abs(spectrum.eigenvalues(k), alpha) +
      0.5 * std::log(static_cast<double>(n));
  for (Index m = 0; m < n; ++m) {
    const int d = union_distance(profile.geometry, m, profile.regions);
    const double upper = detail::log_add_exp(
        log_edge - profile.beta * static_cast<double>(d), log_bulk);
    update(report.landscape_upper, upper - landscape.values(m), m);
  }
  return report;
}

/// One row of the concentration-check table.
struct LemmaRow {
  double delta = 0.0;
  double empirical_p = 0.0;
  long long samples = 0;
  double std_error = 0.0;
};

/// Empirical P(|<e_1, r>| <= delta / sqrt(n)) for r uniform on the unit
/// sphere (normalized standard normals), per delta, from one pass of shared
/// samples. Sampling runs in fixed-size chunks with per-chunk substreams,
/// so the result is independent of the thread count.
inline std::vector<LemmaRow> lemma_montecarlo(Index n,
                                              const std::vector<double>& deltas,
                                              long long samples,
                                              std::uint64_t seed,
                                              int threads = 1) {
  if (n < 2) throw InvalidInputError("lemma_montecarlo: n must be >= 2");
  if (samples < 10000)
    throw InvalidInputError("lemma_montecarlo: need at least 10^4 samples");
  for (double delta : deltas)
    if (!(delta > 0.0 && delta <= 1.0))
      throw InvalidInputError("lemma_montecarlo: delta must lie in (0, 1]");

  constexpr long long kChunk = 16384;
  const long long chunks = (samples + kChunk - 1) / kChunk;
  std::vector<std::vector<long long>> counts(
      chunks, std::vector<long long>(deltas.size(), 0));
  const rng::Stream root(seed);
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  exec::parallel_for(chunks, threads, [&](std::int64_t c) {
    rng::Stream stream = root.substream(static_cast<std::uint64_t>(c));
    const long long begin = c * kChunk;
    const long long end = std::min(samples, begin + kChunk);
    Vector g(n);
    for (long long s = begin; s < end; ++s) {
      for (Index i = 0; i < n; ++i) g(i) = stream.normal();
      const double overlap = std::abs(g(0)) / g.norm();
      for (std::size_t d = 0; d < deltas.size(); ++d)
        if (overlap <= deltas[d] / sqrt_n) ++counts[c][d];
    }
  });

  std::vector<LemmaRow> rows;
  rows.reserve(deltas.size());
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    long long hits = 0;
    for (long long c = 0; c < chunks; ++c) hits += counts[c][d];
    const double p =
        static_cast<double>(hits) / static_cast<double>(samples);
    rows.push_back({deltas[d], p, samples,
                    std::sqrt(p * (1.0 - p) / static_cast<double>(samples))});
  }
  return rows;
}

struct FailureBoundCheck {
  double empirical_p = 0.0;
  double bound = 0.0;  ///< sqrt(n) (|lambda_2| / |lambda_1|)^alpha
  long long samples = 0;
};

/// Empirical probability that the leading term lambda_1^alpha phi_1 <phi_1,r>
/// is dominated by the rest of the expansion, for r uniform on the sphere,
/// against the spectral-gap bound.
inline FailureBoundCheck failure_probability_montecarlo(
    const Spectrum& spectrum, int alpha, long long samples,
    std::uint64_t seed, int threads = 1) {
  const Index n = spectrum.dim();
  if (n < 2)
    throw InvalidInputError("failure_probability: need dimension >= 2");
  if (samples < 10000)
    throw InvalidInputError("failure_probability: need at least 10^4 samples");
  const double abs_1 = std::abs(spectrum.eigenvalues(0));
  const double abs_2 = std::abs(spectrum.eigenvalues(1));
  if (abs_1 == 0.0)
    throw InvalidInputError("failure_probability: zero leading eigenvalue");

  constexpr long long kChunk = 4096;
  const long long chunks = (samples + kChunk - 1) / kChunk;
  std::vector<long long> counts(chunks, 0);
  const rng::Stream root(seed);

  exec::parallel_for(chunks, threads, [&](std::int64_t c) {
    rng::Stream stream = root.substream(static_cast<std::uint64_t>(c));
    const long long begin = c * kChunk;
    const long long end = std::min(samples, begin + kChunk);
    Vector g(n);
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    for (long long s = begin; s < end; ++s) {
      for (Index i = 0; i < n; ++i) g(i) = stream.normal();
      g /= g.norm();
      const Vector coeff = spectrum.eigenvectors.transpose() * g;
      const double lead =
          detail::log_pow_abs(spectrum.eigenvalues(0), alpha) +
          (coeff(0) == 0.0 ? kNegInf : std::log(std::abs(coeff(0))));
      // 0.5 * log sum_{i>=2} (lambda_i^alpha c_i)^2
      double peak = kNegInf;
      for (Index i = 1; i < n; ++i) {
        if (coeff(i) == 0.0) continue;
        peak = std::max(peak,
                        2.0 * detail::log_pow_abs(spectrum.eigenvalues(i),
                                                  alpha) +
                            2.0 * std::log(std::abs(coeff(i))));
      }
      double rest = kNegInf;
      if (peak != kNegInf) {
        double sum = 0.0;
        for (Index i = 1; i < n; ++i) {
          if (coeff(i) == 0.0) continue;
          sum += std::exp(2.0 * detail::log_pow_abs(spectrum.eigenvalues(i),
                                                    alpha) +
                          2.0 * std::log(std::abs(coeff(i))) - peak);
        }
        rest = 0.5 * (peak + std::log(sum));
      }
      if (lead <= rest) ++counts[c];
    }
  });

  long long hits = 0;
  for (long long c = 0; c < chunks; ++c) hits += counts[c];
  FailureBoundCheck check;
  check.samples = samples;
  check.empirical_p =
      static_cast<double>(hits) / static_cast<double>(samples);
  check.bound = std::exp(0.5 * std::log(static_cast<double>(n)) +
                         alpha * std::log(abs_2 / abs_1));
  return check;
}

}  // namespace locland
