#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lambda_infer/measure.h"
#include "lambda_infer/moment_space.h"
#include "lambda_infer/rng.h"

namespace lambda_infer {

// Truncated stick-breaking Dirichlet-process mixture of truncated normal kernels.
struct Prior_spec {
  double eta = k_default_eta;
  int truncation = 4;    // number of kernels T
  double alpha0 = 0.1;   // total mass of the uniform base measure on [eta, 1]
  double sigma_a = 1.0;  // kernel standard deviations ~ Beta(sigma_a, sigma_b)
  double sigma_b = 3.0;

  auto validate() const -> void;
  auto dimension() const -> int { return 3 * truncation - 1; }
};

// T locations, T standard deviations and T - 1 stick fractions.
struct Prior_params {
  std::vector<double> locations;
  std::vector<double> sigmas;
  std::vector<double> sticks;

  // w_1 = v_1, w_i = v_i prod_{j<i} (1 - v_j), w_T = prod_j (1 - v_j).
  auto weights() const -> std::vector<double>;
  // Flat coordinates: locations, then sigmas, then sticks.
  auto to_vector() const -> std::vector<double>;
  static auto from_vector(const std::vector<double>& x, int truncation) -> Prior_params;
};

// Names of the flat coordinates: r1.., sigma1.., v1...
auto parameter_names(const Prior_spec& spec) -> std::vector<std::string>;

// Box of the random walk: [eta, 1] for locations, [0, 1] otherwise.
auto parameter_lower_bounds(const Prior_spec& spec) -> std::vector<double>;
auto parameter_upper_bounds(const Prior_spec& spec) -> std::vector<double>;

auto sample_prior(const Prior_spec& spec, Rng& rng) -> Prior_params;
auto sample_prior(const Prior_spec& spec, std::uint64_t seed) -> Prior_params;

// Log density with respect to Lebesgue measure on the (location, sigma, stick)
// box; -inf outside the open support.
auto log_prior_density(const Prior_spec& spec, const Prior_params& params) -> double;

auto params_to_measure(const Prior_spec& spec, const Prior_params& params) -> Lambda_measure;
auto params_to_moments(const Prior_spec& spec, const Prior_params& params, int n)
    -> Moment_sequence;

// 4 N exp(-(T - 1) / alpha0).
auto truncation_error_bound(const Prior_spec& spec, int data_size) -> double;

}  // namespace lambda_infer
