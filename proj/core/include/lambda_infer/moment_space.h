#pragma once

#include <vector>

#include "lambda_infer/discrete_measure.h"
#include "lambda_infer/measure.h"

namespace lambda_infer {

// Truncated moment sequence (lambda_3, ..., lambda_n) with lambda_2 = 1 implied.
class Moment_sequence {
 public:
  explicit Moment_sequence(std::vector<double> values);

  static auto from_measure(const Lambda_measure& measure, int n) -> Moment_sequence;

  auto n() const -> int { return static_cast<int>(values_.size()) + 2; }
  auto values() const -> const std::vector<double>& { return values_; }
  // lambda_k for 2 <= k <= n.
  auto operator()(int k) const -> double;
  // Raw moment int x^j Lambda(dx) = lambda_{j+2}.
  auto raw(int j) const -> double { return (*this)(j + 2); }

 private:
  std::vector<double> values_;
};

// lambda_{m,k} = sum_j C(m-k, j) (-1)^j lambda_{k+j}, evaluated in long double.
auto binomial_transform(const Moment_sequence& seq, int m, int k) -> long double;

struct Monotonicity_violation {
  int m;
  int k;
  double value;
};

struct Monotonicity_report {
  bool monotone = true;
  std::vector<Monotonicity_violation> violations;
};

// Checks lambda_{m,k} >= -tol for 2 <= k <= m <= n, where tol = 1e-12 plus a
// rounding allowance proportional to sum_j C(m-k, j) |lambda_{k+j}|.
auto check_complete_monotonicity(const Moment_sequence& seq) -> Monotonicity_report;

// Three-term recurrence of the orthonormal polynomials
//   b_{k+1} phi_{k+1}(x) = (x - a_k) phi_k(x) - b_k phi_{k-1}(x),  phi_0 = 1.
// a[k] for k < order; b[k] for 1 <= k < order (b[0] is unused and zero).
struct Orthonormal_recurrence {
  int requested_order = 0;  // floor((n - 3) / 2)
  int order = 0;            // largest order supported by the moments
  bool degenerate = false;  // order < requested_order
  std::vector<double> a;
  std::vector<double> b;
};

inline constexpr double k_hankel_pivot_threshold = 1e-12;

// Hankel-Cholesky route from raw moments; needs n >= 5.
auto orthonormal_recurrence(const Moment_sequence& seq) -> Orthonormal_recurrence;

// Evaluates phi_0..phi_{count-1} at x.
auto orthonormal_values(const Orthonormal_recurrence& rec, double x, int count)
    -> std::vector<double>;

struct Quadrature_rule {
  std::vector<double> nodes;    // strictly increasing in [0, 1]
  std::vector<double> weights;  // rho_{m-1}(node) = 1 / sum_{k<m} phi_k(node)^2
  bool degenerate = false;

  auto order() const -> int { return static_cast<int>(nodes.size()); }
  auto as_discrete() const -> Discrete_measure;
};

auto gauss_quadrature(const Moment_sequence& seq) -> Quadrature_rule;
auto gauss_quadrature(const Orthonormal_recurrence& rec) -> Quadrature_rule;

// One link of the Chebyshev-Markov-Stieltjes chain:
//   Lambda([0, node]) <= cumulative <= Lambda([0, next_node)),
// where the final link uses next_node = 1 with the closed interval [0, 1].
struct Cms_link {
  double node;
  double next_node;
  double cumulative;
};

// Interval [lo, hi), closed on the right for the last one, with a mass value.
struct Interval_mass {
  double lo;
  double hi;
  bool closed_right;
  double mass;
};

struct Cms_envelope {
  Quadrature_rule rule;
  std::vector<Cms_link> links;
  // Caps on Lambda(I_j) for I_0 = [0, xi_1), I_j = [xi_j, xi_{j+1}), I_m = [xi_m, 1].
  std::vector<Interval_mass> interval_caps;
};

auto cms_envelope(const Moment_sequence& seq) -> Cms_envelope;

struct Cms_check {
  bool holds = true;
  std::vector<int> failed_links;      // indices into links
  std::vector<int> failed_intervals;  // indices into interval_caps
};

auto check_measure(const Cms_envelope& envelope, const Lambda_measure& measure,
                   double tolerance = 1e-9) -> Cms_check;

struct Interlaced_pair {
  std::vector<Interval_mass> x_intervals;  // nonzero masses on even intervals
  std::vector<Interval_mass> y_intervals;  // nonzero masses on odd intervals
  Discrete_measure x;                      // masses at interval midpoints
  Discrete_measure y;
};

// Needs a rule of order >= 2.
auto interlaced_pair(const Moment_sequence& seq) -> Interlaced_pair;

// Atomic measure on the Gauss nodes; a node at 0 becomes Kingman mass.
auto canonical_representative(const Moment_sequence& seq) -> Lambda_measure;

}  // namespace lambda_infer
