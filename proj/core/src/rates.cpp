#include "lambda_infer/rates.h"

#include <cmath>
#include <string>

#include <boost/math/special_functions/binomial.hpp>

#include "lambda_infer/errors.h"
#include "lambda_infer/moment_space.h"

namespace lambda_infer {

namespace {

auto log_beta(double a, double b) -> double {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Adds weight * (1-r)^(p-k) r^(k-2) to every entry, using power tables.
auto accumulate_point(double r, double weight, int n_max, std::vector<double>& out,
                      std::vector<double>& up, std::vector<double>& down) -> void {
  up.resize(n_max + 1);
  down.resize(n_max + 1);
  up[0] = down[0] = 1.0;
  for (int j = 1; j <= n_max; ++j) {
    up[j] = up[j - 1] * r;
    down[j] = down[j - 1] * (1.0 - r);
  }
  auto stride = static_cast<std::size_t>(n_max + 1);
  for (int p = 2; p <= n_max; ++p) {
    auto* row = out.data() + p * stride;
    for (int k = 2; k <= p; ++k) row[k] += weight * down[p - k] * up[k - 2];
  }
}

}  // namespace

auto binomial(int n, int k) -> double {
  if (k < 0 || k > n) return 0.0;
  return boost::math::binomial_coefficient<double>(n, k);
}

Rate_table::Rate_table(int n_max, std::vector<double> lambda)
    : n_max_{n_max}, lambda_{std::move(lambda)} {
  size_rate_.assign(lambda_.size(), 0.0);
  total_.assign(n_max_ + 1, 0.0);
  for (int p = 2; p <= n_max_; ++p) {
    auto sum = 0.0;
    for (int k = 2; k <= p; ++k) {
      auto rate = binomial(p, k) * lambda_[index(p, k)];
      size_rate_[index(p, k)] = rate;
      sum += rate;
    }
    total_[p] = sum;
  }
}

auto Rate_table::from_measure(const Lambda_measure& measure, int n_max) -> Rate_table {
  if (n_max < 2) throw Domain_error{"rate table needs n_max >= 2"};
  auto stride = static_cast<std::size_t>(n_max + 1);
  auto lambda = std::vector<double>(stride * stride, 0.0);
  for (int p = 2; p <= n_max; ++p) lambda[p * stride + 2] += measure.kingman_mass();
  auto up = std::vector<double>{};
  auto down = std::vector<double>{};
  for (const auto& atom : measure.atoms()) {
    accumulate_point(atom.location, atom.weight, n_max, lambda, up, down);
  }
  auto nodes = std::vector<double>{};
  auto weights = std::vector<double>{};
  for (const auto& kernel : measure.kernels()) {
    if (kernel.weight == 0.0) continue;
    kernel_quadrature(kernel, measure.eta(), nodes, weights);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      accumulate_point(nodes[i], kernel.weight * weights[i], n_max, lambda, up, down);
    }
  }
  for (const auto& beta : measure.betas()) {
    if (beta.weight == 0.0) continue;
    for (int p = 2; p <= n_max; ++p) {
      for (int k = 2; k <= p; ++k) {
        lambda[p * stride + k] += beta.weight * std::exp(log_beta(beta.a + k - 2, beta.b + p - k) -
                                                         log_beta(beta.a, beta.b));
      }
    }
  }
  return Rate_table{n_max, std::move(lambda)};
}

auto Rate_table::from_moments(const Moment_sequence& moments, int n_max) -> Rate_table {
  if (n_max < 2) throw Domain_error{"rate table needs n_max >= 2"};
  if (moments.n() < n_max) throw Domain_error{"moment sequence too short for the rate table"};
  auto stride = static_cast<std::size_t>(n_max + 1);
  auto lambda = std::vector<double>(stride * stride, 0.0);
  for (int p = 2; p <= n_max; ++p) {
    // The alternating sum amplifies the rounding of the inputs by sum_j C(p-k, j).
    auto total = 0.0L;
    auto error = 0.0L;
    for (int k = 2; k <= p; ++k) {
      auto value = binomial_transform(moments, p, k);
      auto scale = 0.0L;
      auto c = 1.0L;
      for (int j = 0; j <= p - k; ++j) {
        scale += c * std::abs(static_cast<long double>(moments(k + j)));
        c = c * (p - k - j) / (j + 1);
      }
      lambda[p * stride + k] = static_cast<double>(value);
      total += binomial(p, k) * value;
      error += binomial(p, k) * scale * 0x1.0p-52L;
    }
    if (error > k_moment_rate_tolerance * std::abs(total)) {
      throw Numerical_error{"moments up to lambda_" + std::to_string(n_max) +
                                " do not resolve the merger rates in double precision; pass the measure instead",
                            static_cast<double>(error / std::abs(total))};
    }
  }
  return Rate_table{n_max, std::move(lambda)};
}

auto Rate_table::sample_merger_size(int p, Rng& rng) const -> int {
  auto u = uniform_open(rng) * total_rate(p);
  auto acc = 0.0;
  for (int k = 2; k <= p; ++k) {
    acc += size_rate(p, k);
    if (u < acc) return k;
  }
  for (int k = p; k >= 2; --k) {
    if (size_rate(p, k) > 0.0) return k;
  }
  return 2;
}

}  // namespace lambda_infer
