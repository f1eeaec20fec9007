#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "levyexit/experiment.hpp"
#include "levyexit/sde.hpp"
#include "levyexit/stats.hpp"

using namespace levyexit;

namespace {

PathParams zero_noise_params(double x0, double h, double t_max, Scheme scheme) {
  PathParams pp;
  pp.eps = 0.1;
  pp.h = h;
  pp.t_max = t_max;
  pp.scheme = scheme;
  pp.split = SplitSpec(1.0, 0.1, 0.5, false);
  pp.x0 = x0;
  return pp;
}

}  // namespace

TEST(DriftStep, Rk4AndStiffHandOff) {
  const Quadratic q{1.0};
  EXPECT_NEAR(drift_step(q, 1.0, 0.01), std::exp(-0.01), 1e-11);
  const HarmonicQuartic hq{1.0, 1.0};
  EXPECT_NEAR(drift_step(hq, -50.0, 0.01), hq.exact_flow(-50.0, 0.01), 1e-12);
  const auto spec = PotentialSpec::from(HarmonicQuartic{1.0, 1.0});
  EXPECT_NEAR(drift_step(spec, -50.0, 0.01), hq.exact_flow(-50.0, 0.01), 1e-8);
}

TEST(SimulateExit, ZeroNoiseFollowsFlow) {
  const Quadratic q{1.0};
  const auto dom = ExitDomain::bounded(1.0, 1.0);
  for (Scheme scheme : {Scheme::Euler, Scheme::JumpAdapted}) {
    RngStream rng(1, 0);
    PathSample trace;
    const auto rec = simulate_exit(q, dom, StableNoiseSpec::silent(), zero_noise_params(0.5, 1e-3, 5.0, scheme), rng, &trace);
    EXPECT_TRUE(rec.censored);
    EXPECT_EQ(rec.exit_time, 5.0);
    EXPECT_EQ(rec.n_large_jumps, 0u);
    ASSERT_EQ(trace.times.size(), trace.values.size());
    ASSERT_GT(trace.times.size(), 4000u);
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
      if (i > 0) ASSERT_GT(trace.times[i], trace.times[i - 1]);
      ASSERT_NEAR(trace.values[i], 0.5 * std::exp(-trace.times[i]), 1e-6);
    }
  }
}

TEST(SimulateExit, ZeroNoiseFarLeftHalfLineStart) {
  const HarmonicQuartic p{1.0, 1.0};
  const auto dom = ExitDomain::half_line(1.0);
  RngStream rng(2, 0);
  PathSample trace;
  const auto rec = simulate_exit_euler(p, dom, StableNoiseSpec::silent(), zero_noise_params(-50.0, 0.01, 2.0, Scheme::Euler), rng, &trace);
  EXPECT_TRUE(rec.censored);
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    ASSERT_NEAR(trace.values[i], p.exact_flow(-50.0, trace.times[i]), 1e-6) << trace.times[i];
  }
}

TEST(SimulateExit, StartOutsideExitsImmediately) {
  const Quadratic q{1.0};
  const auto dom = ExitDomain::bounded(1.0, 1.0);
  for (Scheme scheme : {Scheme::Euler, Scheme::JumpAdapted}) {
    RngStream rng(3, 0);
    const auto rec = simulate_exit(q, dom, StableNoiseSpec::silent(), zero_noise_params(1.5, 0.01, 5.0, scheme), rng);
    EXPECT_EQ(rec.exit_time, 0.0);
    EXPECT_FALSE(rec.censored);
    EXPECT_EQ(rec.exit_position, 1.5);
  }
}

TEST(SimulateExit, TinyEpsWithoutArrivalsHugsFlow) {
  const Quadratic q{1.0};
  const auto dom = ExitDomain::bounded(1.0, 1.0);
  PathParams pp;
  pp.eps = 1e-8;
  pp.h = 1e-3;
  pp.t_max = 3.0;
  pp.scheme = Scheme::JumpAdapted;
  pp.split = SplitSpec(1.0, pp.eps, 0.5);
  pp.x0 = 0.8;
  RngStream rng(4, 0);
  PathSample trace;
  const auto rec = simulate_exit_jump_adapted(q, dom, StableNoiseSpec(1.0, 0.0), pp, rng, &trace);
  ASSERT_EQ(rec.n_large_jumps, 0u);
  EXPECT_TRUE(rec.censored);
  for (std::size_t i = 0; i < trace.times.size(); ++i) ASSERT_NEAR(trace.values[i], 0.8 * std::exp(-trace.times[i]), 1e-6);
}

TEST(SimulateExit, ParameterErrors) {
  const Quadratic q{1.0};
  const auto dom = ExitDomain::bounded(1.0, 1.0);
  RngStream rng(5, 0);
  auto pp = zero_noise_params(0.0, 0.01, 1.0, Scheme::JumpAdapted);
  pp.split.reset();
  EXPECT_THROW(simulate_exit(q, dom, StableNoiseSpec(1.0, 0.0), pp, rng), std::invalid_argument);
  pp = zero_noise_params(0.0, 0.0, 1.0, Scheme::Euler);
  EXPECT_THROW(simulate_exit(q, dom, StableNoiseSpec(1.0, 0.0), pp, rng), std::domain_error);
  pp = zero_noise_params(0.0, 0.01, 1.0, Scheme::JumpAdapted);
  pp.split = SplitSpec(1.5, 0.1);
  EXPECT_THROW(simulate_exit(q, dom, StableNoiseSpec(1.0, 0.0), pp, rng), std::invalid_argument);
}

TEST(SimulateExit, OverflowIsClamped) {
  ExitRecord rec;
  PathParams pp;
  detail::finish_exit(rec, 1.0, std::numeric_limits<double>::infinity(), pp);
  EXPECT_TRUE(rec.clamped);
  EXPECT_EQ(rec.exit_position, pp.sentinel);
  ExitRecord neg;
  detail::finish_exit(neg, 1.0, -1e20, pp);
  EXPECT_TRUE(neg.clamped);
  EXPECT_EQ(neg.exit_position, -pp.sentinel);
  ExitRecord nan;
  detail::finish_exit(nan, 1.0, std::nan(""), pp);
  EXPECT_TRUE(nan.clamped);
  EXPECT_TRUE(std::isfinite(nan.exit_position));
}

TEST(SimulateExit, RecordInvariants) {
  const Quadratic q{1.0};
  const auto dom = ExitDomain::bounded(1.0, 0.8);
  const StableNoiseSpec noise(1.2, 0.0);
  for (Scheme scheme : {Scheme::Euler, Scheme::JumpAdapted}) {
    PathParams pp;
    pp.eps = 0.1;
    pp.h = 0.01;
    pp.t_max = 40.0;
    pp.scheme = scheme;
    pp.split = SplitSpec(1.2, 0.1);
    for (std::uint64_t i = 0; i < 300; ++i) {
      RngStream rng(6, i);
      const auto rec = simulate_exit(q, dom, noise, pp, rng);
      EXPECT_EQ(rec.stream_id, i);
      EXPECT_LE(rec.exit_time, pp.t_max);
      if (!rec.censored) EXPECT_FALSE(dom.contains(rec.exit_position));
      if (rec.exited_at_large_jump) {
        ASSERT_TRUE(rec.pre_jump_position.has_value());
        EXPECT_TRUE(dom.contains(*rec.pre_jump_position));
        EXPECT_GE(rec.n_large_jumps, 1u);
      }
    }
  }
}

TEST(SimulateExit, ReplaysFromSameStream) {
  const Quadratic q{1.0};
  const auto dom = ExitDomain::bounded(1.0, 1.0);
  PathParams pp;
  pp.eps = 0.1;
  pp.split = SplitSpec(1.0, 0.1);
  RngStream a(9, 3), b(9, 3);
  const auto ra = simulate_exit(q, dom, StableNoiseSpec(1.0, 0.5), pp, a);
  const auto rb = simulate_exit(q, dom, StableNoiseSpec(1.0, 0.5), pp, b);
  EXPECT_EQ(ra.exit_time, rb.exit_time);
  EXPECT_EQ(ra.exit_position, rb.exit_position);
}

TEST(FirstOrderZ, VanishesWithoutNoise) {
  RngStream rng(10, 0);
  const auto path = simulate_first_order_z(Quadratic{1.0}, 0.5, SplitSpec(1.0, 0.1, 0.5, false), 0.0, 0.01, 2.0, rng);
  ASSERT_EQ(path.times.size(), path.values.size());
  ASSERT_EQ(path.driver.size(), path.values.size());
  EXPECT_EQ(path.times.back(), 2.0);
  for (double z : path.values) EXPECT_EQ(z, 0.0);
  EXPECT_THROW(simulate_first_order_z(Quadratic{1.0}, 0.5, SplitSpec(1.0, 0.1), 0.0, 0.01, 0.0, rng), std::domain_error);
}

TEST(FirstOrderZ, OrnsteinUhlenbeckStationaryVariance) {
  const double m = 2.0, d = 1.0;
  RngStream rng(11, 0);
  const auto path = simulate_first_order_z(Quadratic{m}, 0.0, SplitSpec(1.0, 0.1, 0.5, false), d, 0.01, 20000.0, rng);
  double s2 = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 1000; i < path.values.size(); i += 50) {
    s2 += path.values[i] * path.values[i];
    ++n;
  }
  EXPECT_NEAR(s2 / static_cast<double>(n) / (d / (2.0 * m)), 1.0, 0.05);
}

TEST(FirstOrderZ, DriverAccumulatesIncrements) {
  RngStream rng(12, 0);
  const auto path = simulate_first_order_z(Quadratic{1.0}, 0.3, SplitSpec(1.0, 0.1), 0.0, 0.01, 1.0, rng);
  // With U'' = 1, Z_{k+1} = (1 - h) Z_k + dxi_k.
  double z = 0.0;
  for (std::size_t k = 1; k < path.values.size(); ++k) {
    const double dt = path.times[k] - path.times[k - 1];
    z = (1.0 - dt) * z + (path.driver[k] - path.driver[k - 1]);
    ASSERT_NEAR(path.values[k], z, 1e-12);
  }
}

TEST(Wilson, Interval) {
  const auto zero = wilson_estimate(0, 100);
  EXPECT_EQ(zero.probability, 0.0);
  EXPECT_EQ(zero.ci_low, 0.0);
  EXPECT_NEAR(zero.ci_high, 0.03699, 1e-4);
  const auto half = wilson_estimate(50, 100);
  EXPECT_NEAR(half.ci_low, 0.4038, 1e-4);
  EXPECT_NEAR(half.ci_high, 0.5962, 1e-4);
  const auto none = wilson_estimate(0, 0);
  EXPECT_EQ(none.n, 0u);
}

TEST(TubeDeviation, SilentNoiseNeverLeaves) {
  const auto est = tube_deviation_prob(Quadratic{1.0}, 0.0, SplitSpec(1.0, 0.1, 0.5, false), 0.0, 1.0, 0.2, 0.01, 500, 1);
  EXPECT_EQ(est.hits, 0u);
  EXPECT_EQ(est.probability, 0.0);
  EXPECT_EQ(est.n, 500u);
  EXPECT_NEAR(est.tube_radius, std::pow(0.1, 0.2), 1e-15);
  EXPECT_THROW(tube_deviation_prob(Quadratic{1.0}, 0.0, SplitSpec(1.0, 0.1), 0.0, 0.0, 0.2, 0.01, 10, 1),
               std::domain_error);
}

TEST(TubeDeviation, DecreasesWithEpsAndIsWorkerIndependent) {
  const Quadratic q{1.0};
  const auto big = tube_deviation_prob(q, 0.0, SplitSpec(1.0, 0.1), 0.0, 1.0, 0.2, 0.01, 3000, 5, 0, 1);
  const auto big4 = tube_deviation_prob(q, 0.0, SplitSpec(1.0, 0.1), 0.0, 1.0, 0.2, 0.01, 3000, 5, 0, 4);
  const auto small = tube_deviation_prob(q, 0.0, SplitSpec(1.0, 0.05), 0.0, 1.0, 0.2, 0.01, 3000, 5, 0, 1);
  EXPECT_EQ(big.hits, big4.hits);
  EXPECT_GT(big.hits, 0u);
  EXPECT_LT(small.probability, big.probability);
}

TEST(DeviationFit, ZeroHitsUseUpperBound) {
  const std::vector<double> eps{0.1, 0.05, 0.02};
  const std::vector<DeviationEstimate> est{wilson_estimate(65, 5000), wilson_estimate(6, 5000), wilson_estimate(0, 5000)};
  const auto fit = deviation_power_fit(eps, est);
  EXPECT_GT(fit.slope, 0.0);
  // Replacing the zero by anything smaller than its upper bound can only steepen the fit.
  auto steeper = est;
  steeper[2].hits = 1;
  steeper[2].probability = 1e-5;
  EXPECT_GT(deviation_power_fit(eps, steeper).slope, fit.slope);
  EXPECT_THROW(deviation_power_fit(std::vector<double>{0.1}, std::vector<DeviationEstimate>{est[0]}),
               std::invalid_argument);
}

TEST(Experiment, ZeroPathsGiveInsufficientSummary) {
  ExperimentConfig cfg;
  cfg.eps = {0.1};
  cfg.n_paths = 0;
  const auto r = run_experiment(cfg);
  EXPECT_TRUE(r.records.empty());
  EXPECT_FALSE(r.summary.sufficient);
  EXPECT_TRUE(std::isnan(r.summary.mean));
}

TEST(Experiment, InvalidConfigFailsBeforeSimulation) {
  ExperimentConfig cfg;
  cfg.eps = {0.1};
  cfg.alpha = 2.0;
  cfg.n_paths = 10;
  EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
  cfg.alpha = 1.0;
  cfg.eps = {};
  EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
}

TEST(Experiment, RecordsIndependentOfWorkerCount) {
  ExperimentConfig cfg;
  cfg.alpha = 1.5;
  cfg.eps = {0.2};
  cfg.n_paths = 200;
  cfg.seed = 17;
  const auto one = run_experiment(cfg, 0, 1u);
  const auto four = run_experiment(cfg, 0, 4u);
  ASSERT_EQ(one.records.size(), four.records.size());
  for (std::size_t i = 0; i < one.records.size(); ++i) {
    EXPECT_EQ(one.records[i].exit_time, four.records[i].exit_time);
    EXPECT_EQ(one.records[i].exit_position, four.records[i].exit_position);
    EXPECT_EQ(one.records[i].stream_id, stream_for(0, i));
  }
}

TEST(Experiment, MeanExitNearPrediction) {
  ExperimentConfig cfg;
  cfg.alpha = 1.5;
  cfg.eps = {0.1};
  cfg.n_paths = 1000;
  cfg.seed = 23;
  const auto r = run_experiment(cfg, 0, 1u);
  EXPECT_EQ(r.summary.censored_count, 0u);
  EXPECT_NEAR(r.summary.mean / r.prediction.mean, 1.0, 0.3);
  EXPECT_LT(r.summary.ks_statistic, 0.06);
}
