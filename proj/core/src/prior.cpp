#include "lambda_infer/prior.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lambda_infer/errors.h"

namespace lambda_infer {

namespace {

constexpr double k_neg_inf = -std::numeric_limits<double>::infinity();
constexpr double k_below_one = 1.0 - 0x1.0p-53;

auto log_beta_fn(double a, double b) -> double {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

auto log_beta_density(double x, double a, double b) -> double {
  if (!(x > 0.0 && x < 1.0)) {
    // Endpoints are kept only where the density is finite and positive.
    if (x == 0.0 && a == 1.0) return -log_beta_fn(a, b);
    return k_neg_inf;
  }
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta_fn(a, b);
}

auto sample_beta(double a, double b, Rng& rng) -> double {
  // 1 - U^(1/b) rounds to 1 for small U when b is small; keep draws in the open box.
  if (a == 1.0) return std::min(1.0 - std::pow(uniform_open(rng), 1.0 / b), k_below_one);
  auto x = std::gamma_distribution<double>{a, 1.0}(rng);
  auto y = std::gamma_distribution<double>{b, 1.0}(rng);
  return x / (x + y);
}

}  // namespace

auto Prior_spec::validate() const -> void {
  if (truncation < 1) throw Domain_error{"truncation must be >= 1"};
  if (!(alpha0 > 0.0)) throw Domain_error{"alpha0 must be positive"};
  if (!(eta > 0.0 && eta < 1.0)) throw Domain_error{"eta must lie in (0, 1)"};
  if (!(sigma_a > 0.0 && sigma_b > 0.0)) throw Domain_error{"sigma prior shapes must be positive"};
}

auto Prior_params::weights() const -> std::vector<double> {
  auto w = std::vector<double>{};
  auto rest = 1.0;
  for (auto v : sticks) {
    w.push_back(v * rest);
    rest *= 1.0 - v;
  }
  w.push_back(rest);
  return w;
}

auto Prior_params::to_vector() const -> std::vector<double> {
  auto x = locations;
  x.insert(x.end(), sigmas.begin(), sigmas.end());
  x.insert(x.end(), sticks.begin(), sticks.end());
  return x;
}

auto Prior_params::from_vector(const std::vector<double>& x, int truncation) -> Prior_params {
  if (static_cast<int>(x.size()) != 3 * truncation - 1) {
    throw Domain_error{"parameter vector has the wrong length"};
  }
  auto t = static_cast<std::size_t>(truncation);
  return {{x.begin(), x.begin() + t}, {x.begin() + t, x.begin() + 2 * t}, {x.begin() + 2 * t, x.end()}};
}

auto parameter_names(const Prior_spec& spec) -> std::vector<std::string> {
  auto names = std::vector<std::string>{};
  for (int i = 1; i <= spec.truncation; ++i) names.push_back("r" + std::to_string(i));
  for (int i = 1; i <= spec.truncation; ++i) names.push_back("sigma" + std::to_string(i));
  for (int i = 1; i < spec.truncation; ++i) names.push_back("v" + std::to_string(i));
  return names;
}

auto parameter_lower_bounds(const Prior_spec& spec) -> std::vector<double> {
  auto lo = std::vector<double>(spec.dimension(), 0.0);
  for (int i = 0; i < spec.truncation; ++i) lo[i] = spec.eta;
  return lo;
}

auto parameter_upper_bounds(const Prior_spec& spec) -> std::vector<double> {
  return std::vector<double>(spec.dimension(), 1.0);
}

auto sample_prior(const Prior_spec& spec, Rng& rng) -> Prior_params {
  spec.validate();
  auto params = Prior_params{};
  for (int i = 0; i < spec.truncation; ++i) {
    params.locations.push_back(spec.eta + (1.0 - spec.eta) * uniform_open(rng));
  }
  for (int i = 0; i < spec.truncation; ++i) {
    params.sigmas.push_back(sample_beta(spec.sigma_a, spec.sigma_b, rng));
  }
  for (int i = 0; i + 1 < spec.truncation; ++i) {
    params.sticks.push_back(sample_beta(1.0, spec.alpha0, rng));
  }
  return params;
}

auto sample_prior(const Prior_spec& spec, std::uint64_t seed) -> Prior_params {
  auto rng = make_rng(seed);
  return sample_prior(spec, rng);
}

auto log_prior_density(const Prior_spec& spec, const Prior_params& params) -> double {
  auto t = static_cast<std::size_t>(spec.truncation);
  if (params.locations.size() != t || params.sigmas.size() != t || params.sticks.size() + 1 != t) {
    throw Domain_error{"parameter dimensions do not match the prior"};
  }
  auto total = 0.0;
  for (auto r : params.locations) {
    if (!(r >= spec.eta && r <= 1.0)) return k_neg_inf;
    total -= std::log(1.0 - spec.eta);
  }
  for (auto s : params.sigmas) {
    if (!(s > 0.0)) return k_neg_inf;
    total += log_beta_density(s, spec.sigma_a, spec.sigma_b);
  }
  for (auto v : params.sticks) total += log_beta_density(v, 1.0, spec.alpha0);
  return total;
}

auto params_to_measure(const Prior_spec& spec, const Prior_params& params) -> Lambda_measure {
  auto w = params.weights();
  auto kernels = std::vector<Normal_kernel>{};
  for (std::size_t i = 0; i < w.size(); ++i) {
    kernels.push_back({params.locations[i], params.sigmas[i], w[i]});
  }
  return Lambda_measure::kernel_mixture(std::move(kernels), spec.eta);
}

auto params_to_moments(const Prior_spec& spec, const Prior_params& params, int n)
    -> Moment_sequence {
  return Moment_sequence::from_measure(params_to_measure(spec, params), n);
}

auto truncation_error_bound(const Prior_spec& spec, int data_size) -> double {
  spec.validate();
  return 4.0 * data_size * std::exp(-(spec.truncation - 1) / spec.alpha0);
}

}  // namespace lambda_infer
