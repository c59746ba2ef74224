#pragma once

#include <vector>

namespace lambda_infer {

struct Point_mass {
  double x;  // in [0, 1]
  double w;
};

// Finitely supported probability measure on [0, 1].
struct Discrete_measure {
  std::vector<Point_mass> atoms;

  auto total_mass() const -> double;
  // Integral of x^j.
  auto raw_moment(int j) const -> double;
};

// Total variation norm |mu - nu|([0, 1]); equals 2 for mutually singular
// probability measures.
auto total_variation(const Discrete_measure& mu, const Discrete_measure& nu) -> double;

}  // namespace lambda_infer
