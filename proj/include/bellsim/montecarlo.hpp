#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "bellsim/angle.hpp"
#include "bellsim/model.hpp"
#include "bellsim/parallel.hpp"
#include "bellsim/rng.hpp"

namespace bellsim {

/// How the sweep assigns random samples to its points.
enum class SamplingMode {
  /// One sample set is drawn up front and reused at every sweep point.
  /// Adjacent points then share all randomness, so the curve is smooth at
  /// sub-statistical scales (the points are statistically dependent).
  kReplicate,
  /// Every sweep point draws its own substream; points are independent
  /// estimates.
  kIndependent,
};

/// One emitted photon pair: the hidden polarization plus the local
/// uniform variate consumed by each polarizer.
struct PairSample {
  double theta = 0.0;  // hidden polarization, in [0, pi)
  double u_a = 0.0;    // wing-A variate, in [0, 1)
  double u_b = 0.0;    // wing-B variate, in [0, 1)
};

/// The +-1 detection outcomes of one pair. Every pair produces an outcome
/// at both wings; there is no no-detection state.
struct OutcomePair {
  int x = 0;  // wing A
  int y = 0;  // wing B
};

/// Sample mean of the outcome products with its standard error.
struct EstimatedCorrelation {
  double mean = 0.0;       // (sum of x*y) / n, exact
  double std_error = 0.0;  // sample sd of x*y (n-1 denominator) / sqrt(n)
  std::size_t n = 0;
};

/// Evenly spaced beta grid, inclusive of both endpoints.
/// n_points == 1 collapses to {beta_start}.
struct SweepGrid {
  double beta_start = 0.0;
  double beta_end = kPi;
  std::size_t n_points = 1000;
};

struct ExperimentConfig {
  std::size_t n_pairs = 100000;
  std::uint64_t seed = 42;
  SamplingMode mode = SamplingMode::kReplicate;
  Angle alpha{0.0};
  SweepGrid sweep{};
};

struct CurvePoint {
  double beta = 0.0;
  EstimatedCorrelation est{};
};

/// Correlation as a function of beta at fixed alpha. std_error and n are
/// zero when the curve is analytic rather than estimated.
struct CorrelationCurve {
  std::vector<CurvePoint> points;
};

/// Substream label used for the shared sample set in replicate mode.
inline constexpr std::string_view kMainStreamLabel = "main";

/// Draws n photon pairs: theta uniform on [0, pi), u_a and u_b uniform on
/// [0, 1), all independent. Deterministic given (n, seed, stream_label);
/// sample i consumes draws 3i..3i+2 of the stream, so any prefix of a longer
/// draw is identical. Throws std::domain_error if n == 0.
inline std::vector<PairSample> draw_samples(std::size_t n, std::uint64_t seed,
                                            std::string_view stream_label) {
  if (n == 0) {
    throw std::domain_error("draw_samples: n must be positive");
  }
  const RandomStream stream(seed, stream_label);
  std::vector<PairSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t k = 3 * static_cast<std::uint64_t>(i);
    out[i].theta = kPi * stream.uniform(k);
    out[i].u_a = stream.uniform(k + 1);
    out[i].u_b = stream.uniform(k + 2);
  }
  return out;
}

/// Decides both detections for one pair. The comparison is strict less-than,
/// so a variate exactly equal to the detection probability yields -1.
inline OutcomePair simulate_pair(const PairSample& s, Angle alpha, Angle beta) {
  const Angle theta{s.theta};
  const int x = s.u_a < lhv_detect_prob_a(theta, alpha) ? 1 : -1;
  const int y = s.u_b < lhv_detect_prob_b(theta, beta) ? 1 : -1;
  return OutcomePair{x, y};
}

/// Mean and standard error from the sum of n +-1 products. For +-1 values
/// the sum of squares is n, so the n-1 sample variance is n(1 - mean^2)/(n-1)
/// exactly. n == 1 has no variance estimate; its standard error is 0.
inline EstimatedCorrelation correlation_from_product_sum(long long product_sum,
                                                         std::size_t n) {
  EstimatedCorrelation est;
  est.n = n;
  est.mean = static_cast<double>(product_sum) / static_cast<double>(n);
  if (n > 1) {
    const double var =
        static_cast<double>(n) * std::max(0.0, 1.0 - est.mean * est.mean) /
        static_cast<double>(n - 1);
    est.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return est;
}

/// Correlation estimate over already-decided outcomes.
/// Throws std::domain_error if outcomes is empty.
inline EstimatedCorrelation estimate_correlation(
    std::span<const OutcomePair> outcomes) {
  if (outcomes.empty()) {
    throw std::domain_error("estimate_correlation: no outcomes");
  }
  long long sum = 0;
  for (const auto& o : outcomes) {
    sum += static_cast<long long>(o.x) * o.y;
  }
  return correlation_from_product_sum(sum, outcomes.size());
}

/// Simulates every pair at settings (alpha, beta) and averages the outcome
/// products. Throws std::domain_error if samples is empty.
inline EstimatedCorrelation estimate_correlation(
    std::span<const PairSample> samples, Angle alpha, Angle beta) {
  if (samples.empty()) {
    throw std::domain_error("estimate_correlation: no samples");
  }
  long long sum = 0;
  for (const auto& s : samples) {
    const OutcomePair o = simulate_pair(s, alpha, beta);
    sum += static_cast<long long>(o.x) * o.y;
  }
  return correlation_from_product_sum(sum, samples.size());
}

/// Draws n outcome pairs from an explicit joint distribution by inverse CDF
/// over the four outcomes in the order (+,+), (+,-), (-,+), (-,-).
/// Deterministic given (dist, n, seed, stream_label).
inline std::vector<OutcomePair> sample_joint_outcomes(
    const JointDistribution& dist, std::size_t n, std::uint64_t seed,
    std::string_view stream_label) {
  if (n == 0) {
    throw std::domain_error("sample_joint_outcomes: n must be positive");
  }
  const RandomStream stream(seed, stream_label);
  const double c1 = dist.p_pp;
  const double c2 = c1 + dist.p_pm;
  const double c3 = c2 + dist.p_mp;
  std::vector<OutcomePair> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = stream.uniform(i);
    if (u < c1) {
      out[i] = {1, 1};
    } else if (u < c2) {
      out[i] = {1, -1};
    } else if (u < c3) {
      out[i] = {-1, 1};
    } else {
      out[i] = {-1, -1};
    }
  }
  return out;
}

inline std::vector<double> sweep_betas(const SweepGrid& grid) {
  std::vector<double> betas(grid.n_points);
  if (grid.n_points == 1) {
    betas[0] = grid.beta_start;
    return betas;
  }
  const double step = (grid.beta_end - grid.beta_start) /
                      static_cast<double>(grid.n_points - 1);
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    betas[i] = i + 1 == grid.n_points
                   ? grid.beta_end
                   : grid.beta_start + static_cast<double>(i) * step;
  }
  return betas;
}

inline void validate_config(const ExperimentConfig& config) {
  if (config.n_pairs == 0) {
    throw std::domain_error("run_sweep: n_pairs must be positive");
  }
  if (config.sweep.n_points == 0) {
    throw std::domain_error("run_sweep: n_points must be positive");
  }
  if (!std::isfinite(config.alpha.radians) ||
      !std::isfinite(config.sweep.beta_start) ||
      !std::isfinite(config.sweep.beta_end)) {
    throw std::domain_error("run_sweep: angles must be finite");
  }
  if (config.sweep.n_points > 1 &&
      !(config.sweep.beta_end > config.sweep.beta_start)) {
    throw std::domain_error(
        "run_sweep: beta_end must exceed beta_start when n_points > 1");
  }
}

/// Estimates the correlation at every grid point. The result is a pure
/// function of the config: per-point work is independent and may run on any
/// number of threads (n_threads == 0 picks the hardware default) without
/// changing a single bit of the output.
inline CorrelationCurve run_sweep(const ExperimentConfig& config,
                                  unsigned n_threads = 0) {
  validate_config(config);
  const std::vector<double> betas = sweep_betas(config.sweep);
  CorrelationCurve curve;
  curve.points.resize(betas.size());

  if (config.mode == SamplingMode::kReplicate) {
    const std::vector<PairSample> samples =
        draw_samples(config.n_pairs, config.seed, kMainStreamLabel);
    parallel_for_index(betas.size(), n_threads, [&](std::size_t i) {
      curve.points[i].beta = betas[i];
      curve.points[i].est =
          estimate_correlation(samples, config.alpha, Angle{betas[i]});
    });
  } else {
    parallel_for_index(betas.size(), n_threads, [&](std::size_t i) {
      const std::vector<PairSample> samples = draw_samples(
          config.n_pairs, config.seed, point_label("point", i));
      curve.points[i].beta = betas[i];
      curve.points[i].est =
          estimate_correlation(samples, config.alpha, Angle{betas[i]});
    });
  }
  return curve;
}

}  // namespace bellsim
