#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "bellsim/montecarlo.hpp"

using namespace bellsim;
using Catch::Matchers::WithinAbs;

namespace {

bool same_estimate(const EstimatedCorrelation& a,
                   const EstimatedCorrelation& b) {
  return a.mean == b.mean && a.std_error == b.std_error && a.n == b.n;
}

bool same_curve(const CorrelationCurve& a, const CorrelationCurve& b) {
  if (a.points.size() != b.points.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (a.points[i].beta != b.points[i].beta ||
        !same_estimate(a.points[i].est, b.points[i].est)) {
      return false;
    }
  }
  return true;
}

double max_adjacent_jump(const CorrelationCurve& curve) {
  double jump = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    jump = std::max(jump, std::abs(curve.points[i].est.mean -
                                   curve.points[i - 1].est.mean));
  }
  return jump;
}

}  // namespace

TEST_CASE("draw_samples is deterministic and seed-sensitive") {
  CHECK_THROWS_AS(draw_samples(0, 42, "main"), std::domain_error);

  const auto first = draw_samples(5, 42, "main");
  const auto second = draw_samples(5, 42, "main");
  REQUIRE(first.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(first[i].theta == second[i].theta);
    CHECK(first[i].u_a == second[i].u_a);
    CHECK(first[i].u_b == second[i].u_b);
  }

  const auto other_seed = draw_samples(5, 43, "main");
  CHECK(first[0].theta != other_seed[0].theta);
  const auto other_label = draw_samples(5, 42, "point/0");
  CHECK(first[0].theta != other_label[0].theta);

  // A shorter draw is a prefix of a longer one.
  const auto longer = draw_samples(10, 42, "main");
  CHECK(longer[4].theta == first[4].theta);
  CHECK(longer[4].u_b == first[4].u_b);
}

TEST_CASE("draw_samples produces uniform hidden polarizations") {
  const auto samples = draw_samples(100000, 42, "main");
  double sum = 0.0;
  for (const PairSample& s : samples) {
    REQUIRE(s.theta >= 0.0);
    REQUIRE(s.theta < kPi);
    REQUIRE(s.u_a >= 0.0);
    REQUIRE(s.u_a < 1.0);
    REQUIRE(s.u_b >= 0.0);
    REQUIRE(s.u_b < 1.0);
    sum += s.theta;
  }
  const double mean = sum / 1e5;
  // 4-sigma band for the mean of Uniform(0, pi) at n = 1e5.
  CHECK(std::abs(mean - kPi / 2.0) < 0.0115);
}

TEST_CASE("simulate_pair decides outcomes by strict comparison") {
  // Detection probabilities exactly 1 at both wings.
  CHECK(simulate_pair({0.0, 0.5, 0.5}, Angle{0}, Angle{kPi / 2.0}).x == 1);
  CHECK(simulate_pair({0.0, 0.5, 0.5}, Angle{0}, Angle{kPi / 2.0}).y == 1);

  // Crossed polarizers: probabilities are zero (up to rounding), so any
  // variate fails the strict comparison.
  CHECK(simulate_pair({0.0, 0.2, 0.2}, Angle{kPi / 2.0}, Angle{0}).x == -1);
  CHECK(simulate_pair({0.0, 0.2, 0.2}, Angle{kPi / 2.0}, Angle{0}).y == -1);

  // A variate exactly equal to the detection probability yields -1; one ulp
  // below yields +1.
  const double p_a = lhv_detect_prob_a(Angle{kPi / 4.0}, Angle{0});
  const double p_b = lhv_detect_prob_b(Angle{kPi / 4.0}, Angle{kPi / 2.0});
  const PairSample on_boundary{kPi / 4.0, p_a, p_b};
  CHECK(simulate_pair(on_boundary, Angle{0}, Angle{kPi / 2.0}).x == -1);
  CHECK(simulate_pair(on_boundary, Angle{0}, Angle{kPi / 2.0}).y == -1);
  const PairSample just_below{kPi / 4.0, std::nextafter(p_a, 0.0),
                              std::nextafter(p_b, 0.0)};
  CHECK(simulate_pair(just_below, Angle{0}, Angle{kPi / 2.0}).x == 1);
  CHECK(simulate_pair(just_below, Angle{0}, Angle{kPi / 2.0}).y == 1);
}

TEST_CASE("estimate_correlation tracks the analytic correlation") {
  CHECK_THROWS_AS(
      estimate_correlation(std::span<const PairSample>{}, Angle{0}, Angle{0}),
      std::domain_error);

  const auto samples = draw_samples(100000, 42, "main");
  // 4-sigma Monte Carlo bands around the analytic values.
  const auto at_equal = estimate_correlation(samples, Angle{0}, Angle{0});
  CHECK(std::abs(at_equal.mean - (-0.5)) < 0.013);
  CHECK(at_equal.n == 100000);
  CHECK(at_equal.std_error > 0.0);
  const auto at_45 = estimate_correlation(samples, Angle{0}, Angle{kPi / 4.0});
  CHECK(std::abs(at_45.mean) < 0.013);
}

TEST_CASE("estimates agree with theory within four sigma at frozen settings") {
  const auto samples = draw_samples(100000, 42, "main");
  const RandomStream stream(97, "agreement");
  for (std::uint64_t i = 0; i < 5; ++i) {
    const Angle alpha{kPi * stream.uniform(2 * i)};
    const Angle beta{kPi * stream.uniform(2 * i + 1)};
    const double expected = lhv_correlation(alpha, beta).value;
    const double band =
        4.0 * std::sqrt((1.0 - expected * expected) / 1e5);
    const EstimatedCorrelation est =
        estimate_correlation(samples, alpha, beta);
    CAPTURE(alpha.radians, beta.radians, expected, band);
    CHECK(std::abs(est.mean - expected) < band);
    // The reported standard error matches the binomial prediction.
    CHECK_THAT(est.std_error,
               WithinAbs(std::sqrt((1.0 - expected * expected) / 1e5),
                         0.2 * est.std_error + 1e-6));
  }
}

TEST_CASE("per-wing detection frequencies are one half") {
  const auto samples = draw_samples(100000, 42, "main");
  const Angle alpha{0.7};
  const Angle beta{2.1};
  std::size_t x_plus = 0, y_plus = 0;
  for (const PairSample& s : samples) {
    const OutcomePair o = simulate_pair(s, alpha, beta);
    x_plus += o.x == 1;
    y_plus += o.y == 1;
  }
  // 4-sigma band: 4 * 0.5 / sqrt(1e5).
  CHECK(std::abs(static_cast<double>(x_plus) / 1e5 - 0.5) < 0.0064);
  CHECK(std::abs(static_cast<double>(y_plus) / 1e5 - 0.5) < 0.0064);
}

TEST_CASE("estimate over outcomes is exactly bilinear in the outcomes") {
  const auto samples = draw_samples(2000, 9, "main");
  std::vector<OutcomePair> outcomes;
  for (const PairSample& s : samples) {
    outcomes.push_back(simulate_pair(s, Angle{0.3}, Angle{1.2}));
  }
  const EstimatedCorrelation plain = estimate_correlation(outcomes);
  for (OutcomePair& o : outcomes) {
    o.y = -o.y;
  }
  const EstimatedCorrelation negated = estimate_correlation(outcomes);
  CHECK(negated.mean == -plain.mean);
  CHECK(negated.std_error == plain.std_error);
}

TEST_CASE("single-outcome estimates have zero standard error") {
  const std::vector<OutcomePair> one{{1, 1}};
  const EstimatedCorrelation est = estimate_correlation(one);
  CHECK(est.mean == 1.0);
  CHECK(est.std_error == 0.0);
  CHECK(est.n == 1);
}

TEST_CASE("sample_joint_outcomes reproduces the sampled distribution") {
  CHECK_THROWS_AS(sample_joint_outcomes(JointDistribution{}, 0, 1, "x"),
                  std::domain_error);

  const JointDistribution dist =
      qm_joint_distribution(Angle{0}, Angle{kPi / 8.0});
  const auto outcomes = sample_joint_outcomes(dist, 100000, 42, "chsh/0");
  const auto again = sample_joint_outcomes(dist, 100000, 42, "chsh/0");
  REQUIRE(outcomes.size() == 100000);
  CHECK(outcomes[0].x == again[0].x);
  CHECK(outcomes[99999].y == again[99999].y);

  std::size_t pp = 0, pm = 0, mp = 0, mm = 0;
  for (const OutcomePair& o : outcomes) {
    pp += o.x == 1 && o.y == 1;
    pm += o.x == 1 && o.y == -1;
    mp += o.x == -1 && o.y == 1;
    mm += o.x == -1 && o.y == -1;
  }
  const auto band = [](double p) {
    return 4.0 * std::sqrt(p * (1.0 - p) / 1e5);
  };
  CHECK(std::abs(static_cast<double>(pp) / 1e5 - dist.p_pp) < band(dist.p_pp));
  CHECK(std::abs(static_cast<double>(pm) / 1e5 - dist.p_pm) < band(dist.p_pm));
  CHECK(std::abs(static_cast<double>(mp) / 1e5 - dist.p_mp) < band(dist.p_mp));
  CHECK(std::abs(static_cast<double>(mm) / 1e5 - dist.p_mm) < band(dist.p_mm));

  const EstimatedCorrelation est = estimate_correlation(outcomes);
  CHECK(std::abs(est.mean - dist.correlation_value()) < 0.013);
}

TEST_CASE("sweep_betas spans the grid inclusively") {
  const auto betas = sweep_betas(SweepGrid{0.0, kPi, 1000});
  REQUIRE(betas.size() == 1000);
  CHECK(betas.front() == 0.0);
  CHECK(betas.back() == kPi);
  for (std::size_t i = 1; i < betas.size(); ++i) {
    CHECK(betas[i] > betas[i - 1]);
  }
  CHECK_THAT(betas[1] - betas[0], WithinAbs(kPi / 999.0, 1e-15));

  const auto single = sweep_betas(SweepGrid{0.25, kPi, 1});
  REQUIRE(single.size() == 1);
  CHECK(single[0] == 0.25);
}

TEST_CASE("run_sweep rejects invalid configs") {
  ExperimentConfig cfg;
  cfg.n_pairs = 0;
  CHECK_THROWS_AS(run_sweep(cfg), std::domain_error);

  cfg = ExperimentConfig{};
  cfg.sweep.n_points = 0;
  CHECK_THROWS_AS(run_sweep(cfg), std::domain_error);

  cfg = ExperimentConfig{};
  cfg.sweep = SweepGrid{1.0, 1.0, 10};
  CHECK_THROWS_AS(run_sweep(cfg), std::domain_error);

  cfg = ExperimentConfig{};
  cfg.alpha = Angle{std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(run_sweep(cfg), std::domain_error);
}

TEST_CASE("a single-point sweep equals a direct estimate on the same samples") {
  ExperimentConfig cfg;
  cfg.n_pairs = 5000;
  cfg.seed = 42;
  cfg.sweep = SweepGrid{0.0, kPi, 1};
  const CorrelationCurve curve = run_sweep(cfg);
  REQUIRE(curve.points.size() == 1);

  const auto samples = draw_samples(cfg.n_pairs, cfg.seed, kMainStreamLabel);
  const auto direct = estimate_correlation(samples, cfg.alpha, Angle{0.0});
  CHECK(curve.points[0].beta == 0.0);
  CHECK(same_estimate(curve.points[0].est, direct));
}

TEST_CASE("run_sweep is a pure function of its config") {
  ExperimentConfig cfg;
  cfg.n_pairs = 20000;
  cfg.sweep = SweepGrid{0.0, kPi, 40};

  const CorrelationCurve first = run_sweep(cfg);
  const CorrelationCurve second = run_sweep(cfg);
  CHECK(same_curve(first, second));

  const CorrelationCurve one_thread = run_sweep(cfg, 1);
  const CorrelationCurve three_threads = run_sweep(cfg, 3);
  CHECK(same_curve(first, one_thread));
  CHECK(same_curve(first, three_threads));

  cfg.mode = SamplingMode::kIndependent;
  const CorrelationCurve ind_a = run_sweep(cfg, 1);
  const CorrelationCurve ind_b = run_sweep(cfg, 3);
  CHECK(same_curve(ind_a, ind_b));
}

TEST_CASE("replicate mode reuses samples, independent mode does not") {
  ExperimentConfig cfg;
  cfg.n_pairs = 30000;
  cfg.seed = 42;
  cfg.sweep = SweepGrid{0.0, kPi, 500};

  cfg.mode = SamplingMode::kReplicate;
  const CorrelationCurve replicated = run_sweep(cfg);
  cfg.mode = SamplingMode::kIndependent;
  const CorrelationCurve independent = run_sweep(cfg);

  // Shared samples make adjacent points move together; independent
  // substreams leave full Monte Carlo noise between neighbors.
  CHECK(max_adjacent_jump(replicated) < 0.015);
  CHECK(max_adjacent_jump(independent) > 0.015);

  // Both modes still track the analytic curve.
  for (const CorrelationCurve* curve : {&replicated, &independent}) {
    double max_dev = 0.0;
    for (const CurvePoint& p : curve->points) {
      max_dev = std::max(max_dev,
                         std::abs(p.est.mean + 0.5 * std::cos(2.0 * p.beta)));
    }
    CHECK(max_dev < 0.04);
  }
}
