#pragma once

#include <span>
#include <vector>

namespace lambda_infer {

struct Gauss_legendre_rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Golub-Welsch rule with `order` nodes, cached per order.
auto gauss_legendre(int order) -> const Gauss_legendre_rule&;

// Composite rule mapped to [a, b]: `panels` equal panels of `order` nodes each.
// Appends (x, w) pairs to the output vectors.
auto append_composite_rule(double a, double b, int panels, int order,
                           std::vector<double>& x, std::vector<double>& w) -> void;

}  // namespace lambda_infer
