#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lambda_infer/likelihood.h"
#include "lambda_infer/prior.h"
#include "lambda_infer/rates.h"
#include "lambda_infer/rng.h"

namespace lambda_infer {

enum class Chain_variant { exact, noisy, da_exact, da_noisy };

auto parse_variant(const std::string& name) -> Chain_variant;  // throws Data_error
auto variant_name(Chain_variant variant) -> std::string;

// Coordinates in which the random walk moves the stick fractions.
enum class Stick_walk {
  prior_cdf,  // u = 1 - (1 - v)^alpha0
  raw,        // v itself
};

struct Chain_config {
  Chain_variant variant = Chain_variant::exact;
  int steps = 1;
  double scale = 0.0025;  // proposal variance per coordinate
  std::uint64_t seed = 0;
  int thinning = 1;
  Prior_spec prior{};
  Stick_walk stick_walk = Stick_walk::prior_cdf;

  auto validate() const -> void;
};

// A point of the chain with everything derived from its parameters.
struct Chain_point {
  std::vector<double> coords;  // walk coordinates
  Prior_params params;
  double log_prior = 0.0;      // in walk coordinates
  std::vector<double> moments;  // lambda_3..lambda_N
  std::shared_ptr<const Rate_table> rates;
  double log_estimate = 0.0;
  double log_surrogate = 0.0;
};

// Supplies likelihood estimates to the chain.  log_estimate must be the log of a
// nonnegative unbiased estimate; log_surrogate must be deterministic.
class Chain_target {
 public:
  virtual ~Chain_target() = default;
  // Fills moments and any cached quantities; params and log_prior are set.
  virtual auto evaluate(Chain_point& point) const -> void = 0;
  virtual auto log_estimate(const Chain_point& point, std::uint64_t seed) const -> double = 0;
  virtual auto log_surrogate(const Chain_point& point) const -> double = 0;
  virtual auto moment_count() const -> int = 0;  // N, so moments are lambda_3..lambda_N
};

// Likelihood of time-series data under the kernel-mixture measure of the params.
class Data_target : public Chain_target {
 public:
  Data_target(Prior_spec prior, Typed_data data, Mutation_model mutation,
              Estimator_options estimator, int surrogate_particles = k_surrogate_particles,
              bool exact = false);

  auto evaluate(Chain_point& point) const -> void override;
  auto log_estimate(const Chain_point& point, std::uint64_t seed) const -> double override;
  auto log_surrogate(const Chain_point& point) const -> double override;
  auto moment_count() const -> int override;

 private:
  Prior_spec prior_;
  Typed_data data_;
  Mutation_model mutation_;
  Estimator_options estimator_;
  int surrogate_particles_;
  bool exact_;
  std::vector<int> exact_counts_;
};

struct Proposal {
  std::vector<double> coords;
  Prior_params params;
  double log_ratio;  // log K(x', x) - log K(x, x')
};

// Random-walk coordinates: the flat parameter vector, with sticks replaced by
// u = 1 - (1 - v)^alpha0 under Stick_walk::prior_cdf.
auto to_walk_coordinates(const Prior_spec& spec, const Prior_params& params, Stick_walk walk)
    -> std::vector<double>;
// Inverse map.  Sticks that round to 1 are clamped to the largest double below 1.
auto from_walk_coordinates(const Prior_spec& spec, const std::vector<double>& coords,
                           Stick_walk walk) -> Prior_params;
// Log prior density in walk coordinates (uniform in each u under prior_cdf).
auto log_walk_prior(const Prior_spec& spec, const std::vector<double>& coords, Stick_walk walk)
    -> double;

// Independent truncated normal steps on the parameter box, in walk coordinates.
auto propose(const Prior_spec& spec, const std::vector<double>& coords, double scale, Rng& rng,
             Stick_walk walk = Stick_walk::prior_cdf) -> Proposal;
auto proposal_log_ratio(const Prior_spec& spec, const std::vector<double>& from,
                        const std::vector<double>& to, double scale) -> double;

struct Chain_counters {
  long proposals = 0;
  long stage1_accepted = 0;   // equals proposals with a finite prior for non-delayed variants
  long accepted = 0;
  long full_evaluations = 0;  // likelihood estimates at proposed points
};

struct Chain_state {
  Chain_point current;
  Chain_counters counters;
  bool last_accepted = false;
  bool last_stage1_accepted = false;
};

// Source of estimator seeds, one fresh stream per call.
class Seed_stream {
 public:
  explicit Seed_stream(std::uint64_t seed) : seed_{seed} {}
  auto next() -> std::uint64_t { return child_seed(seed_, counter_++); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

auto pm_step(Chain_state& state, const Chain_target& target, const Chain_config& config, Rng& rng,
             Seed_stream& seeds) -> void;
auto da_step(Chain_state& state, const Chain_target& target, const Chain_config& config, Rng& rng,
             Seed_stream& seeds) -> void;

struct Chain_record {
  long step;
  std::vector<double> params;
  std::vector<double> moments;
  double log_estimate;
  bool accepted;
  bool stage1_accepted;
  double wall_ms;
};

struct Chain_output {
  std::vector<Chain_record> records;  // initial state, then every thinning-th step
  Chain_counters counters;
  int initial_draws = 0;  // prior draws needed for a positive initial estimate
  double wall_ms = 0.0;

  auto stage1_rate() const -> double;
  auto stage2_rate() const -> double;
  auto overall_rate() const -> double;
};

// Starts from a prior draw, re-drawing until the estimate is positive.
auto run_chain(const Chain_config& config, const Chain_target& target) -> Chain_output;

// Empirical type-7 quantile.
auto quantile(std::vector<double> values, double prob) -> double;

// Central interval of the given level from type-7 quantiles.
auto credible_interval(const std::vector<double>& trace, double level) -> std::pair<double, double>;

}  // namespace lambda_infer
