#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lambda_infer/genealogy.h"
#include "lambda_infer/measure.h"
#include "lambda_infer/moment_space.h"
#include "lambda_infer/mutation.h"
#include "lambda_infer/rates.h"

namespace lambda_infer {

// Observed counts as (type, count) pairs sorted by type.
using Type_counts = std::vector<std::pair<int, int>>;

struct Typed_batch {
  double backward_time;  // 0 for the most recent batch
  Type_counts counts;
  int size = 0;
};

// Time-series data with haplotype labels resolved against a mutation model.
// Batches are stored most recent first.
struct Typed_data {
  std::vector<Typed_batch> batches;
  int total_size = 0;
};

auto prepare_data(const Time_series_data& data, const Mutation_model& mutation) -> Typed_data;

// Probability of the unordered type configuration `counts` (one entry per type)
// for a single sample from the stationary population.  Solves the sampling
// recursion level by level; throws Capacity_error past 10^6 configurations.
auto exact_likelihood(const Rate_table& rates, const std::vector<int>& counts,
                      const Mutation_model& mutation) -> double;
auto exact_likelihood(const Lambda_measure& measure, const std::vector<int>& counts,
                      const Mutation_model& mutation) -> double;
// Checks complete monotonicity first (Domain_error otherwise).
auto exact_likelihood(const Moment_sequence& moments, const std::vector<int>& counts,
                      const Mutation_model& mutation) -> double;

// All configurations of size n with their probabilities.
auto exact_likelihood_table(const Rate_table& rates, int n, const Mutation_model& mutation)
    -> std::map<std::vector<int>, double>;

inline constexpr long k_max_exact_configurations = 1'000'000;

enum class Estimator_kind {
  // Sequential importance sampling along the typed ancestral process, proposing
  // each backward event in proportion to its coefficient in the sampling recursion.
  importance_sampling,
  // Untyped serial genealogy followed by exact pruning of the observed types.
  tree_peeling,
};

struct Estimator_options {
  int particles = 1;
  std::uint64_t seed = 0;
  Estimator_kind kind = Estimator_kind::importance_sampling;
  int threads = 1;
};

struct Likelihood_estimate {
  double value = 0.0;          // particle mean
  double log_value = 0.0;      // log(value); -inf when value == 0
  double log_variance = 0.0;   // delta-method estimate of Var(log value)
  double standard_error = 0.0; // of value
  int particles = 0;
  std::uint64_t seed = 0;
  bool zero = false;
};

// Per-particle log weights; their exponentials are i.i.d. unbiased estimates.
auto particle_log_weights(const Rate_table& rates, const Typed_data& data,
                          const Mutation_model& mutation, const Estimator_options& options)
    -> std::vector<double>;

auto estimate_likelihood(const Rate_table& rates, const Typed_data& data,
                         const Mutation_model& mutation, const Estimator_options& options)
    -> Likelihood_estimate;
auto estimate_likelihood(const Lambda_measure& measure, const Time_series_data& data,
                         const Mutation_model& mutation, const Estimator_options& options)
    -> Likelihood_estimate;
auto estimate_likelihood(const Moment_sequence& moments, const Time_series_data& data,
                         const Mutation_model& mutation, const Estimator_options& options)
    -> Likelihood_estimate;

inline constexpr int k_surrogate_particles = 5;

// Stable 64-bit hash of the moment values.
auto moment_hash(const Moment_sequence& moments) -> std::uint64_t;

// Deterministic low-particle estimate whose seed is a hash of the moments.
auto surrogate_likelihood(const Rate_table& rates, const Moment_sequence& moments,
                          const Typed_data& data, const Mutation_model& mutation,
                          int particles = k_surrogate_particles) -> Likelihood_estimate;
auto surrogate_likelihood(const Moment_sequence& moments, const Time_series_data& data,
                          const Mutation_model& mutation,
                          int particles = k_surrogate_particles) -> Likelihood_estimate;

struct Tuning_result {
  int particles;
  double log_variance;  // sample variance of the log estimate at that count
};

// Doubles the particle count from 1 until the sample variance of the log
// estimate over `repeats` runs is <= target; Capacity_error beyond max_particles.
auto tune_particles(const Rate_table& rates, const Typed_data& data, const Mutation_model& mutation,
                    double target_variance, std::uint64_t seed, int repeats = 50,
                    int max_particles = 100'000, Estimator_kind kind = Estimator_kind::importance_sampling,
                    int threads = 1) -> Tuning_result;

// log(mean(exp(x))) computed stably; -inf for an all -inf input.
auto log_mean_exp(const std::vector<double>& x) -> double;

}  // namespace lambda_infer
