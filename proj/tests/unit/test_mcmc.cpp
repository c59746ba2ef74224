#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "lambda_infer/dataset_io.h"
#include "lambda_infer/errors.h"
#include "lambda_infer/mcmc.h"
#include "lambda_infer/measure.h"
#include "lambda_infer/rng.h"

using namespace lambda_infer;

namespace {

// Likelihood given directly as a function of the first location, with optional
// lognormal noise of mean one.
class Toy_target : public Chain_target {
 public:
  Toy_target(std::function<double(double)> log_lik, double noise = 0.0)
      : log_lik_{std::move(log_lik)}, noise_{noise} {}
  auto evaluate(Chain_point& point) const -> void override {
    point.moments = {point.params.locations[0]};
  }
  auto log_estimate(const Chain_point& point, std::uint64_t seed) const -> double override {
    ++estimates;
    auto z = 0.0;
    if (noise_ > 0.0) {
      auto rng = make_rng(seed);
      z = noise_ * std::normal_distribution<double>{}(rng) - 0.5 * noise_ * noise_;
    }
    return log_lik_(point.params.locations[0]) + z;
  }
  auto log_surrogate(const Chain_point& point) const -> double override {
    return log_lik_(point.params.locations[0]);
  }
  auto moment_count() const -> int override { return 3; }
  mutable long estimates = 0;

 private:
  std::function<double(double)> log_lik_;
  double noise_;
};

// Fixed log estimate for every proposal.
class Constant_target : public Chain_target {
 public:
  explicit Constant_target(double value) : value_{value} {}
  auto evaluate(Chain_point& point) const -> void override { point.moments = {0.5}; }
  auto log_estimate(const Chain_point&, std::uint64_t) const -> double override { return value_; }
  auto log_surrogate(const Chain_point&) const -> double override { return value_; }
  auto moment_count() const -> int override { return 3; }

 private:
  double value_;
};

auto interior_params() -> Prior_params {
  return Prior_params{{0.5, 0.5, 0.5, 0.5}, {0.5, 0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}};
}

auto start_state(const Prior_spec& spec, double log_estimate) -> Chain_state {
  auto state = Chain_state{};
  state.current.params = interior_params();
  state.current.coords = to_walk_coordinates(spec, state.current.params, Stick_walk::prior_cdf);
  state.current.log_prior = log_walk_prior(spec, state.current.coords, Stick_walk::prior_cdf);
  state.current.log_estimate = log_estimate;
  state.current.log_surrogate = log_estimate;
  return state;
}

// Batch-means standard error of the mean.
auto batch_se(const std::vector<double>& x, int batches = 25) -> double {
  auto len = x.size() / batches;
  auto means = std::vector<double>{};
  for (int b = 0; b < batches; ++b) {
    means.push_back(std::accumulate(x.begin() + b * len, x.begin() + (b + 1) * len, 0.0) / len);
  }
  auto m = std::accumulate(means.begin(), means.end(), 0.0) / batches;
  auto s = 0.0;
  for (auto v : means) s += (v - m) * (v - m);
  return std::sqrt(s / (batches - 1) / batches);
}

auto mean(const std::vector<double>& x) -> double {
  return std::accumulate(x.begin(), x.end(), 0.0) / x.size();
}

}  // namespace

TEST(Propose, InteriorRatioVanishes) {
  auto spec = Prior_spec{};
  auto from = interior_params().to_vector();
  auto to = from;
  for (std::size_t i = 0; i < to.size(); ++i) to[i] += (i % 2 ? 0.02 : -0.03);
  EXPECT_NEAR(proposal_log_ratio(spec, from, to, 0.0025), 0.0, 1e-6);
}

TEST(Propose, BoundaryRatioFollowsNormaliser) {
  auto spec = Prior_spec{};
  auto from = interior_params().to_vector();
  from[0] = 1.0;
  auto to = from;
  to[0] = 0.9;
  // Z(1.0) = 1/2 and Z(0.9) = Phi(2) up to a negligible lower tail.
  auto phi2 = 0.5 * std::erfc(-2.0 / std::sqrt(2.0));
  auto ratio = proposal_log_ratio(spec, from, to, 0.0025);
  EXPECT_NEAR(ratio, std::log(0.5) - std::log(phi2), 1e-9);
  EXPECT_LT(ratio, 0.0);
  EXPECT_NEAR(proposal_log_ratio(spec, to, from, 0.0025), -ratio, 1e-12);
}

TEST(Propose, StaysInsideBox) {
  auto spec = Prior_spec{};
  auto rng = make_rng(3);
  auto lo = parameter_lower_bounds(spec);
  auto hi = parameter_upper_bounds(spec);
  auto edge = std::vector<double>{spec.eta, 1.0, 0.5, 0.02, 1.0, 1e-9, 0.5, 0.99, 0.0, 0.999, 1.0};
  for (auto walk : {Stick_walk::raw, Stick_walk::prior_cdf}) {
    for (int i = 0; i < 2000; ++i) {
      auto p = propose(spec, edge, 0.0025, rng, walk);
      for (std::size_t j = 0; j < p.coords.size(); ++j) {
        ASSERT_GE(p.coords[j], lo[j]);
        ASSERT_LE(p.coords[j], hi[j]);
      }
      auto x = p.params.to_vector();
      for (std::size_t j = 0; j < x.size(); ++j) {
        ASSERT_GE(x[j], lo[j]);
        ASSERT_LE(x[j], hi[j]);
      }
      ASSERT_TRUE(std::isfinite(p.log_ratio));
    }
  }
}

TEST(Propose, ReturnedRatioMatchesRecomputed) {
  auto spec = Prior_spec{};
  auto rng = make_rng(4);
  auto from = sample_prior(spec, 40);
  for (auto walk : {Stick_walk::raw, Stick_walk::prior_cdf}) {
    auto x = to_walk_coordinates(spec, from, walk);
    for (int i = 0; i < 50; ++i) {
      auto p = propose(spec, x, 0.0025, rng, walk);
      EXPECT_NEAR(p.log_ratio, proposal_log_ratio(spec, x, p.coords, 0.0025), 1e-12);
      EXPECT_NEAR(proposal_log_ratio(spec, p.coords, x, 0.0025), -p.log_ratio, 1e-12);
    }
  }
}

TEST(WalkCoordinates, RoundTripAndClamp) {
  auto spec = Prior_spec{};
  auto p = Prior_params{{0.1, 0.3, 0.5, 0.9}, {0.2, 0.4, 0.6, 0.8}, {0.3, 0.5, 0.99}};
  auto u = to_walk_coordinates(spec, p, Stick_walk::prior_cdf);
  EXPECT_NEAR(u[8], 1 - std::pow(0.7, 0.1), 1e-15);
  auto back = from_walk_coordinates(spec, u, Stick_walk::prior_cdf);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(back.sticks[i], p.sticks[i], 1e-13);
  u[10] = 0.99;
  EXPECT_LT(from_walk_coordinates(spec, u, Stick_walk::prior_cdf).sticks[2], 1.0);
  EXPECT_EQ(to_walk_coordinates(spec, p, Stick_walk::raw), p.to_vector());
}

TEST(WalkCoordinates, PriorDensity) {
  auto spec = Prior_spec{};
  auto p = Prior_params{{0.1, 0.3, 0.5, 0.9}, {0.2, 0.4, 0.6, 0.8}, {0.3, 0.5, 0.7}};
  auto raw = log_walk_prior(spec, p.to_vector(), Stick_walk::raw);
  EXPECT_EQ(raw, log_prior_density(spec, p));
  auto u = to_walk_coordinates(spec, p, Stick_walk::prior_cdf);
  auto flat = log_walk_prior(spec, u, Stick_walk::prior_cdf);
  auto expected = -4.0 * std::log(1.0 - spec.eta);
  for (auto s : p.sigmas) expected += std::log(3.0 * (1 - s) * (1 - s));
  EXPECT_NEAR(flat, expected, 1e-12);
  u[10] = 0.999;
  EXPECT_NEAR(log_walk_prior(spec, u, Stick_walk::prior_cdf), expected, 1e-12);
  u[10] = 1.0;
  EXPECT_NEAR(log_walk_prior(spec, u, Stick_walk::prior_cdf), expected, 1e-12);
}

TEST(PmStep, EqualEstimatesAlwaysAccept) {
  auto spec = Prior_spec{};
  auto config = Chain_config{};
  config.scale = 1e-16;
  auto target = Constant_target{-3.0};
  auto rng = make_rng(5);
  auto seeds = Seed_stream{6};
  auto accepted = 0;
  for (int i = 0; i < 1000; ++i) {
    auto state = start_state(spec, -3.0);
    pm_step(state, target, config, rng, seeds);
    accepted += state.last_accepted;
  }
  EXPECT_EQ(accepted, 1000);
}

TEST(PmStep, DoubledEstimateAccepts) {
  auto spec = Prior_spec{};
  auto config = Chain_config{};
  config.scale = 1e-16;
  auto target = Constant_target{std::log(2.0)};
  auto rng = make_rng(7);
  auto seeds = Seed_stream{8};
  for (int i = 0; i < 1000; ++i) {
    auto state = start_state(spec, 0.0);
    pm_step(state, target, config, rng, seeds);
    ASSERT_TRUE(state.last_accepted);
  }
}

TEST(PmStep, HalvedEstimateAcceptsHalfTheTime) {
  auto spec = Prior_spec{};
  auto config = Chain_config{};
  config.scale = 1e-16;
  auto target = Constant_target{-std::log(2.0)};
  auto rng = make_rng(9);
  auto seeds = Seed_stream{10};
  constexpr int trials = 10000;
  auto accepted = 0;
  for (int i = 0; i < trials; ++i) {
    auto state = start_state(spec, 0.0);
    pm_step(state, target, config, rng, seeds);
    accepted += state.last_accepted;
  }
  EXPECT_NEAR(static_cast<double>(accepted) / trials, 0.5, 3 * std::sqrt(0.25 / trials));
}

TEST(PmStep, ZeroEstimateRejects) {
  auto spec = Prior_spec{};
  auto config = Chain_config{};
  auto target = Constant_target{-INFINITY};
  auto rng = make_rng(11);
  auto seeds = Seed_stream{12};
  auto state = start_state(spec, 0.0);
  for (int i = 0; i < 100; ++i) pm_step(state, target, config, rng, seeds);
  EXPECT_EQ(state.counters.accepted, 0);
  EXPECT_EQ(state.current.params.to_vector(), interior_params().to_vector());
}

TEST(PmStep, NoisyVariantRefreshesCurrent) {
  auto spec = Prior_spec{};
  auto config = Chain_config{};
  config.variant = Chain_variant::noisy;
  auto target = Toy_target{[](double) { return 0.0; }, 1.0};
  auto rng = make_rng(13);
  auto seeds = Seed_stream{14};
  auto state = start_state(spec, 0.0);
  pm_step(state, target, config, rng, seeds);
  EXPECT_EQ(target.estimates, 2);
  config.variant = Chain_variant::exact;
  pm_step(state, target, config, rng, seeds);
  EXPECT_EQ(target.estimates, 3);
}

TEST(DaStep, PerfectSurrogateNeverRejectsAtStageTwo) {
  auto config = Chain_config{};
  config.variant = Chain_variant::da_exact;
  config.steps = 3000;
  config.seed = 15;
  auto target = Toy_target{[](double r) { return -20.0 * (r - 0.3) * (r - 0.3); }};
  auto out = run_chain(config, target);
  EXPECT_EQ(out.counters.accepted, out.counters.stage1_accepted);
  EXPECT_LT(out.counters.stage1_accepted, out.counters.proposals);
  EXPECT_GT(out.counters.accepted, 0);
}

TEST(DaStep, StageOneRejectionSkipsFullEstimate) {
  auto config = Chain_config{};
  config.variant = Chain_variant::da_exact;
  config.steps = 3000;
  config.seed = 16;
  auto target = Toy_target{[](double r) { return -50.0 * r; }, 0.5};
  auto out = run_chain(config, target);
  EXPECT_EQ(out.counters.full_evaluations, out.counters.stage1_accepted);
  // One estimate for the initial state plus one per stage-one survivor.
  EXPECT_EQ(target.estimates, out.counters.full_evaluations + out.initial_draws);
  EXPECT_LT(out.counters.stage1_accepted, out.counters.proposals);
  EXPECT_NEAR(out.stage1_rate() * out.stage2_rate(), out.overall_rate(), 1e-12);
}

TEST(RunChain, SingleStepOutput) {
  auto config = Chain_config{};
  config.steps = 1;
  config.seed = 17;
  auto out = run_chain(config, Constant_target{0.0});
  ASSERT_EQ(out.records.size(), 2u);
  EXPECT_EQ(out.records[0].step, 0);
  EXPECT_EQ(out.records[1].step, 1);
  EXPECT_EQ(out.records[0].params.size(), 11u);
  EXPECT_EQ(out.counters.proposals, 1);
  EXPECT_EQ(out.initial_draws, 1);
}

TEST(RunChain, Thinning) {
  auto config = Chain_config{};
  config.steps = 100;
  config.thinning = 7;
  auto out = run_chain(config, Constant_target{0.0});
  ASSERT_EQ(out.records.size(), 15u);
  EXPECT_EQ(out.records.back().step, 98);
}

TEST(RunChain, SeedDeterminism) {
  auto config = Chain_config{};
  config.steps = 200;
  config.seed = 18;
  auto target = Toy_target{[](double r) { return -10.0 * r * r; }, 0.7};
  auto a = run_chain(config, target);
  auto b = run_chain(config, target);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].params, b.records[i].params);
    EXPECT_EQ(a.records[i].log_estimate, b.records[i].log_estimate);
  }
  config.seed = 19;
  EXPECT_NE(run_chain(config, target).records.back().params, a.records.back().params);
}

TEST(RunChain, RedrawsUntilPositiveEstimate) {
  auto config = Chain_config{};
  config.steps = 10;
  config.seed = 20;
  auto target = Toy_target{[](double r) { return r < 0.2 ? 0.0 : -INFINITY; }};
  auto out = run_chain(config, target);
  EXPECT_GT(out.initial_draws, 1);
  EXPECT_LT(out.records[0].params[0], 0.2);
}

TEST(RunChain, RejectsBadConfig) {
  auto config = Chain_config{};
  config.steps = 0;
  EXPECT_THROW(run_chain(config, Constant_target{0.0}), Domain_error);
  config.steps = 1;
  config.scale = 0.0;
  EXPECT_THROW(run_chain(config, Constant_target{0.0}), Domain_error);
}

TEST(RunChain, ConstantLikelihoodRecoversPrior) {
  auto mutation = Mutation_model::parent_independent(0.0, {0.5, 0.5});
  auto in = std::istringstream{"0 3 0\n0.5 2 0\n"};
  auto data = prepare_data(parse_dataset(in), mutation);
  auto spec = Prior_spec{};
  auto target = Data_target{spec, data, mutation, {1, 0}};

  auto prior_draws = std::vector<double>{};
  auto rng = make_rng(21);
  for (int i = 0; i < 10000; ++i) {
    prior_draws.push_back(moment(params_to_measure(spec, sample_prior(spec, rng)), 3));
  }
  auto prior_mean = mean(prior_draws);
  auto prior_se = std::sqrt(
      std::inner_product(prior_draws.begin(), prior_draws.end(), prior_draws.begin(), 0.0) /
          prior_draws.size() -
      prior_mean * prior_mean) / 100.0;

  for (auto walk : {Stick_walk::prior_cdf}) {
    auto config = Chain_config{};
    config.steps = 200000;
    config.thinning = 10;
    config.seed = 22;
    config.stick_walk = walk;
    auto out = run_chain(config, target);
    EXPECT_EQ(out.counters.full_evaluations, out.counters.proposals);
    auto trace = std::vector<double>{};
    for (const auto& r : out.records) trace.push_back(r.moments[0]);
    EXPECT_NEAR(mean(trace), prior_mean, 3 * std::hypot(batch_se(trace), prior_se))
        << (walk == Stick_walk::raw ? "raw" : "cdf");
  }
}

TEST(RunChain, TwoRegionBalanceWithNoisyEstimates) {
  // L = 1 on r1 < 1/2 and 3 above, r1 uniform a priori: a quarter of the time below.
  auto target = Toy_target{[](double r) { return r < 0.5 ? 0.0 : std::log(3.0); }, 0.8};
  for (auto variant : {Chain_variant::exact, Chain_variant::da_exact}) {
    auto config = Chain_config{};
    config.variant = variant;
    config.steps = 400000;
    config.seed = 23;
    auto out = run_chain(config, target);
    auto below = std::vector<double>{};
    long up = 0;
    long down = 0;
    for (std::size_t i = 0; i < out.records.size(); ++i) {
      below.push_back(out.records[i].params[0] < 0.5 ? 1.0 : 0.0);
      if (i > 0 && below[i] != below[i - 1]) (below[i] > 0.0 ? down : up) += 1;
    }
    auto pa = (0.5 - k_default_eta) / (1 - k_default_eta);
    EXPECT_NEAR(mean(below), pa / (pa + 3 * (1 - pa)), 3 * batch_se(below))
        << variant_name(variant);
    EXPECT_LE(std::abs(up - down), 1);
    EXPECT_GT(up, 100);
  }
}

TEST(Variant, Names) {
  for (auto name : {"exact", "noisy", "da-exact", "da-noisy"}) {
    EXPECT_EQ(variant_name(parse_variant(name)), name);
  }
  EXPECT_THROW(parse_variant("gibbs"), Data_error);
}

TEST(CredibleInterval, Examples) {
  EXPECT_EQ(credible_interval({0.3, 0.3, 0.3}, 0.95), std::make_pair(0.3, 0.3));
  auto rng = make_rng(24);
  auto trace = std::vector<double>(10000);
  for (auto& x : trace) x = uniform_open(rng);
  auto [lo, hi] = credible_interval(trace, 0.95);
  EXPECT_NEAR(lo, 0.025, 0.01);
  EXPECT_NEAR(hi, 0.975, 0.01);
  EXPECT_THROW(credible_interval(trace, 1.0), Domain_error);
  EXPECT_THROW(credible_interval(trace, 0.0), Domain_error);
  EXPECT_THROW(credible_interval({}, 0.5), Domain_error);
}

TEST(Quantile, TypeSeven) {
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile({5}, 0.9), 5.0);
  EXPECT_DOUBLE_EQ(quantile({1, 2}, 1.0), 2.0);
}
