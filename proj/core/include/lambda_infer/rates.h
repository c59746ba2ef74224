#pragma once

#include <vector>

#include "lambda_infer/measure.h"
#include "lambda_infer/rng.h"

namespace lambda_infer {

class Moment_sequence;

inline constexpr double k_moment_rate_tolerance = 1e-6;

// lambda_{p,k} for 2 <= k <= p <= n_max, together with the per-size totals
// R(p) = sum_k C(p,k) lambda_{p,k} and the law of the merger size.
class Rate_table {
 public:
  static auto from_measure(const Lambda_measure& measure, int n_max) -> Rate_table;
  // Binomial transform of lambda_3..lambda_n (n >= n_max), in extended precision.
  // Throws Numerical_error when the worst-case error from rounding the inputs
  // exceeds k_moment_rate_tolerance of some total rate R(p); about n_max > 22.
  static auto from_moments(const Moment_sequence& moments, int n_max) -> Rate_table;

  auto n_max() const -> int { return n_max_; }
  auto lambda(int p, int k) const -> double { return lambda_[index(p, k)]; }
  // Rate at which some k-subset of p blocks merges: C(p,k) lambda_{p,k}.
  auto size_rate(int p, int k) const -> double { return size_rate_[index(p, k)]; }
  auto total_rate(int p) const -> double { return p < 2 ? 0.0 : total_[p]; }

  // Draws k with probability proportional to C(p,k) lambda_{p,k}.
  auto sample_merger_size(int p, Rng& rng) const -> int;

 private:
  Rate_table(int n_max, std::vector<double> lambda);

  auto index(int p, int k) const -> std::size_t {
    return static_cast<std::size_t>(p) * (n_max_ + 1) + k;
  }

  int n_max_ = 0;
  std::vector<double> lambda_;
  std::vector<double> size_rate_;
  std::vector<double> total_;
};

// C(n, k) as a double.
auto binomial(int n, int k) -> double;

}  // namespace lambda_infer
