#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bellsim/angle.hpp"
#include "bellsim/model.hpp"
#include "bellsim/montecarlo.hpp"
#include "bellsim/parallel.hpp"
#include "bellsim/rng.hpp"

namespace bellsim {

/// Any map from a setting pair to a correlation: analytic formulas,
/// Monte Carlo estimates, tabulated data.
using CorrelationSource = std::function<Correlation(Angle, Angle)>;

/// Two settings per wing, normalized to [0, pi).
struct ChshSettings {
  Angle a{};
  Angle a_prime{};
  Angle b{};
  Angle b_prime{};
};

inline ChshSettings make_chsh_settings(double a, double a_prime, double b,
                                       double b_prime) {
  return ChshSettings{normalize_angle(a), normalize_angle(a_prime),
                      normalize_angle(b), normalize_angle(b_prime)};
}

/// The four correlations entering the CHSH combination and the statistic
///   S = E(a,b) - E(a,b') + E(a',b) + E(a',b').
struct ChshResult {
  ChshSettings settings{};
  double e_ab = 0.0;
  double e_ab_prime = 0.0;
  double e_a_prime_b = 0.0;
  double e_a_prime_b_prime = 0.0;
  double s = 0.0;

  double abs_s() const { return std::abs(s); }
};

inline ChshResult chsh_statistic(const CorrelationSource& source,
                                 const ChshSettings& settings) {
  ChshResult r;
  r.settings = settings;
  r.e_ab = source(settings.a, settings.b).value;
  r.e_ab_prime = source(settings.a, settings.b_prime).value;
  r.e_a_prime_b = source(settings.a_prime, settings.b).value;
  r.e_a_prime_b_prime = source(settings.a_prime, settings.b_prime).value;
  r.s = r.e_ab - r.e_ab_prime + r.e_a_prime_b + r.e_a_prime_b_prime;
  return r;
}

inline CorrelationSource lhv_analytic_source() {
  return [](Angle a, Angle b) { return lhv_correlation(a, b); };
}

inline CorrelationSource qm_analytic_source() {
  return [](Angle a, Angle b) { return qm_correlation(a, b); };
}

/// E(a, b) = -k cos 2(a-b); the family interpolating between the
/// hidden-variable model (k = 1/2) and the quantum prediction (k = 1).
inline CorrelationSource scaled_cosine_source(double k) {
  return [k](Angle a, Angle b) {
    return Correlation{-k * std::cos(2.0 * (a.radians - b.radians))};
  };
}

/// Exhaustive search for the largest |S| over the setting grid
/// {0, pi/g, ..., (g-1) pi/g}^4. Ties are broken toward the
/// lexicographically smallest (a, a', b, b'). The scan may be split across
/// threads; the reduction is deterministic, so the result does not depend
/// on the thread count. Throws std::domain_error if g < 2.
inline ChshResult max_abs_chsh(const CorrelationSource& source,
                               std::size_t grid_points_per_angle,
                               unsigned n_threads = 0) {
  const std::size_t g = grid_points_per_angle;
  if (g < 2) {
    throw std::domain_error("max_abs_chsh: grid must have at least 2 points");
  }

  // The statistic only ever evaluates pairs, so tabulate E once; the g^4
  // quadruple scan is then pure lookups.
  std::vector<double> pair_e(g * g);
  std::vector<double> grid(g);
  for (std::size_t i = 0; i < g; ++i) {
    grid[i] = static_cast<double>(i) * kPi / static_cast<double>(g);
  }
  for (std::size_t ia = 0; ia < g; ++ia) {
    for (std::size_t ib = 0; ib < g; ++ib) {
      pair_e[ia * g + ib] = source(Angle{grid[ia]}, Angle{grid[ib]}).value;
    }
  }

  struct Best {
    double abs_s = -1.0;
    std::array<std::size_t, 4> idx{};  // (ia, ia', ib, ib')
  };
  const auto better = [](const Best& lhs, const Best& rhs) {
    if (lhs.abs_s != rhs.abs_s) {
      return lhs.abs_s > rhs.abs_s;
    }
    return lhs.idx < rhs.idx;
  };

  // One slot per outer index; the merge below is a fixed-order reduction, so
  // the result is independent of how the scan was chunked across threads.
  std::vector<Best> per_ia(g);
  parallel_for_index(g, n_threads, [&](std::size_t ia) {
    Best best;
    // Ascending scan with strict improvement keeps the lexicographically
    // smallest quadruple for any tied |S|.
    for (std::size_t ia2 = 0; ia2 < g; ++ia2) {
      for (std::size_t ib = 0; ib < g; ++ib) {
        const double e_ab = pair_e[ia * g + ib];
        const double e_a2b = pair_e[ia2 * g + ib];
        for (std::size_t ib2 = 0; ib2 < g; ++ib2) {
          const double s =
              e_ab - pair_e[ia * g + ib2] + e_a2b + pair_e[ia2 * g + ib2];
          const Best cand{std::abs(s), {ia, ia2, ib, ib2}};
          if (better(cand, best)) {
            best = cand;
          }
        }
      }
    }
    per_ia[ia] = best;
  });

  Best overall;
  for (const Best& b : per_ia) {
    if (b.abs_s >= 0.0 && better(b, overall)) {
      overall = b;
    }
  }

  const ChshSettings settings{
      Angle{grid[overall.idx[0]]}, Angle{grid[overall.idx[1]]},
      Angle{grid[overall.idx[2]]}, Angle{grid[overall.idx[3]]}};
  return chsh_statistic(source, settings);
}

/// Least-squares fit of a curve to  E(beta) = offset - amplitude *
/// cos(2(alpha - beta)).
struct AmplitudeFit {
  double amplitude = 0.0;  // reported as a magnitude
  double offset = 0.0;
  double rmse = 0.0;
};

/// Fits offset and cosine amplitude by solving the 2x2 normal equations for
/// the basis {1, cos 2(alpha - beta)}. On a uniform full-period grid the two
/// basis functions are orthogonal and this reduces to the two Fourier
/// projections; the exact solve also stays exact on grids that include both
/// endpoints. Throws std::domain_error unless the curve has at least 3
/// distinct beta values.
inline AmplitudeFit fit_cosine_amplitude(const CorrelationCurve& curve,
                                         Angle alpha) {
  std::vector<double> betas;
  betas.reserve(curve.points.size());
  for (const CurvePoint& p : curve.points) {
    betas.push_back(p.beta);
  }
  std::sort(betas.begin(), betas.end());
  const std::size_t distinct =
      static_cast<std::size_t>(std::unique(betas.begin(), betas.end()) -
                               betas.begin());
  if (distinct < 3) {
    throw std::domain_error(
        "fit_cosine_amplitude: need at least 3 distinct beta values");
  }

  const double n = static_cast<double>(curve.points.size());
  double sc = 0.0, scc = 0.0, se = 0.0, sce = 0.0;
  for (const CurvePoint& p : curve.points) {
    const double c = std::cos(2.0 * (alpha.radians - p.beta));
    sc += c;
    scc += c * c;
    se += p.est.mean;
    sce += c * p.est.mean;
  }

  // Model E = o + m c with m = -amplitude.
  const double det = n * scc - sc * sc;
  double o, m;
  if (std::abs(det) > 1e-12 * n * std::max(scc, 1.0)) {
    o = (se * scc - sc * sce) / det;
    m = (n * sce - sc * se) / det;
  } else {
    // Degenerate basis (cos term constant over the grid): the amplitude is
    // unidentifiable, report the plain mean.
    o = se / n;
    m = 0.0;
  }

  double ss_res = 0.0;
  for (const CurvePoint& p : curve.points) {
    const double c = std::cos(2.0 * (alpha.radians - p.beta));
    const double r = p.est.mean - o - m * c;
    ss_res += r * r;
  }

  AmplitudeFit fit;
  fit.amplitude = std::abs(m);
  fit.offset = o;
  fit.rmse = std::sqrt(ss_res / n);
  return fit;
}

/// Evaluates an analytic correlation source on a beta grid at fixed alpha.
/// std_error and n are zero: the points are exact, not estimates.
inline CorrelationCurve analytic_curve(const CorrelationSource& source,
                                       Angle alpha, const SweepGrid& grid) {
  if (grid.n_points == 0) {
    throw std::domain_error("analytic_curve: n_points must be positive");
  }
  CorrelationCurve curve;
  for (double beta : sweep_betas(grid)) {
    CurvePoint p;
    p.beta = beta;
    p.est.mean = source(alpha, Angle{beta}).value;
    curve.points.push_back(p);
  }
  return curve;
}

/// Randomized check of the Bell-CHSH bound |S| <= 2 + tolerance over
/// uniformly drawn setting quadruples. The default tolerance suits analytic
/// sources; widen it to cover Monte Carlo noise when the source is
/// empirical. A nonzero violation count is a result, not an error.
struct BoundCheckReport {
  double max_abs_s = 0.0;
  std::size_t violations = 0;
  ChshResult worst{};
  double tolerance = 0.0;
};

inline BoundCheckReport verify_lhv_bound(const CorrelationSource& source,
                                         std::size_t n_random_quadruples,
                                         std::uint64_t seed,
                                         double tolerance = 1e-9) {
  if (n_random_quadruples == 0) {
    throw std::domain_error("verify_lhv_bound: n must be positive");
  }
  const RandomStream stream(seed, "chsh/quadruples");
  BoundCheckReport report;
  report.tolerance = tolerance;
  report.max_abs_s = -1.0;
  for (std::size_t i = 0; i < n_random_quadruples; ++i) {
    const std::uint64_t k = 4 * static_cast<std::uint64_t>(i);
    const ChshSettings settings{
        Angle{kPi * stream.uniform(k)}, Angle{kPi * stream.uniform(k + 1)},
        Angle{kPi * stream.uniform(k + 2)}, Angle{kPi * stream.uniform(k + 3)}};
    const ChshResult r = chsh_statistic(source, settings);
    if (r.abs_s() > report.max_abs_s) {
      report.max_abs_s = r.abs_s();
      report.worst = r;
    }
    if (r.abs_s() > 2.0 + tolerance) {
      ++report.violations;
    }
  }
  return report;
}

/// Empirical CHSH from the hidden-variable pair simulation: each of the four
/// setting pairs gets its own independent sample substream.
inline ChshResult empirical_chsh_lhv(const ChshSettings& settings,
                                     std::size_t n_pairs, std::uint64_t seed) {
  ChshResult r;
  r.settings = settings;
  const std::array<std::pair<Angle, Angle>, 4> pairs{
      std::pair{settings.a, settings.b},
      std::pair{settings.a, settings.b_prime},
      std::pair{settings.a_prime, settings.b},
      std::pair{settings.a_prime, settings.b_prime}};
  std::array<double, 4> e{};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto samples = draw_samples(n_pairs, seed, point_label("chsh", i));
    e[i] = estimate_correlation(samples, pairs[i].first, pairs[i].second).mean;
  }
  r.e_ab = e[0];
  r.e_ab_prime = e[1];
  r.e_a_prime_b = e[2];
  r.e_a_prime_b_prime = e[3];
  r.s = e[0] - e[1] + e[2] + e[3];
  return r;
}

/// Empirical CHSH by sampling outcome pairs from a per-setting joint
/// distribution (for example the quantum-mechanical reference).
inline ChshResult empirical_chsh_from_joint(
    const std::function<JointDistribution(Angle, Angle)>& joint,
    const ChshSettings& settings, std::size_t n_pairs, std::uint64_t seed) {
  ChshResult r;
  r.settings = settings;
  const std::array<std::pair<Angle, Angle>, 4> pairs{
      std::pair{settings.a, settings.b},
      std::pair{settings.a, settings.b_prime},
      std::pair{settings.a_prime, settings.b},
      std::pair{settings.a_prime, settings.b_prime}};
  std::array<double, 4> e{};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto outcomes =
        sample_joint_outcomes(joint(pairs[i].first, pairs[i].second), n_pairs,
                              seed, point_label("chsh", i));
    e[i] = estimate_correlation(outcomes).mean;
  }
  r.e_ab = e[0];
  r.e_ab_prime = e[1];
  r.e_a_prime_b = e[2];
  r.e_a_prime_b_prime = e[3];
  r.s = e[0] - e[1] + e[2] + e[3];
  return r;
}

}  // namespace bellsim
