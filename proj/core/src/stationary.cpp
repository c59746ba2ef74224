#include "lambda_infer/stationary.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lambda_infer/errors.h"

namespace lambda_infer {

namespace {

constexpr double k_quadrature_tolerance = 1e-10;

struct Log_pair {
  double kingman;
  double star;
};

// Log densities given log x, log(1 - x) and log|1 - 2x|, which callers supply
// in a form that stays finite near the singular points.
auto log_densities(double theta, double log_x, double log_1mx, double log_abs_1m2x) -> Log_pair {
  auto log_k = std::lgamma(2.0 * theta) - 2.0 * std::lgamma(theta) +
               (theta - 1.0) * (log_x + log_1mx);
  auto log_s = -std::log(theta) + (1.0 - theta) / theta * log_abs_1m2x;
  return {log_k, log_s};
}

// pi_generating(x) * Q(delta_0 | x) * dx/dt, with everything in logs.
auto integrand(Two_allele_model generating, Log_pair d, double log_jacobian) -> double {
  auto log_gen = (generating == Two_allele_model::kingman) ? d.kingman : d.star;
  // Q = pi_k / (pi_k + pi_s) = 1 / (1 + exp(log_s - log_k))
  auto log_q = -std::log1p(std::exp(d.star - d.kingman));
  if (!std::isfinite(log_q)) log_q = d.kingman - d.star;
  return std::exp(log_gen + log_q + log_jacobian);
}

}  // namespace

auto stationary_density_two_allele(Two_allele_model model, double theta, double x) -> double {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw Domain_error{"theta must be positive"};
  if (!(x >= 0.0 && x <= 1.0)) throw Domain_error{"x must lie in [0, 1]"};
  if (model == Two_allele_model::kingman) {
    return std::exp(std::lgamma(2.0 * theta) - 2.0 * std::lgamma(theta)) *
           std::pow(x, theta - 1.0) * std::pow(1.0 - x, theta - 1.0);
  }
  return std::pow(std::abs(1.0 - 2.0 * x), (1.0 - theta) / theta) / theta;
}

auto expected_limiting_posterior(double theta, Two_allele_model generating) -> double {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw Domain_error{"theta must be positive"};
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  constexpr auto max_depth = 20u;

  // Both densities are symmetric about 1/2.  On [0, 1/4] substitute
  // x = u^(1/a) / 4 with a = min(theta, 1), absorbing x^(theta - 1) when it is
  // singular; on [1/4, 1/2] substitute x = 1/2 - v^b / 4 with b = max(theta, 1),
  // absorbing |1 - 2x|^((1 - theta) / theta) when it is singular.
  auto a = std::min(theta, 1.0);
  auto b = std::max(theta, 1.0);
  auto near_zero = [&](double u) {
    auto log_u = std::log(u);
    auto log_x = std::log(0.25) + log_u / a;
    auto x = std::exp(log_x);
    auto d = log_densities(theta, log_x, std::log1p(-x), std::log1p(-2.0 * x));
    auto log_jacobian = -std::log(4.0 * a) + (1.0 / a - 1.0) * log_u;
    return integrand(generating, d, log_jacobian);
  };
  auto near_half = [&](double v) {
    auto log_v = std::log(v);
    auto half_gap = 0.25 * std::exp(b * log_v);  // 1/2 - x
    auto d = log_densities(theta, std::log(0.5 - half_gap), std::log(0.5 + half_gap),
                           b * log_v - std::numbers::ln2);
    auto log_jacobian = std::log(b / 4.0) + (b - 1.0) * log_v;
    return integrand(generating, d, log_jacobian);
  };

  auto err1 = 0.0;
  auto err2 = 0.0;
  auto i1 = Rule::integrate(near_zero, 0.0, 1.0, max_depth, k_quadrature_tolerance, &err1);
  auto i2 = Rule::integrate(near_half, 0.0, 1.0, max_depth, k_quadrature_tolerance, &err2);
  auto value = 2.0 * (i1 + i2);
  auto error = 2.0 * (err1 + err2);
  if (!std::isfinite(value) || error > 1e-8) {
    throw Numerical_error{"limiting posterior quadrature did not converge", error};
  }
  return value;
}

}  // namespace lambda_infer
