#include "lambda_infer/gauss_legendre.h"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace lambda_infer {

namespace {

auto build_rule(int order) -> Gauss_legendre_rule {
  auto rule = Gauss_legendre_rule{};
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_order.
    auto x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    auto dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      auto p0 = 1.0;
      auto p1 = x;
      for (int k = 2; k <= order; ++k) {
        auto p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      auto dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    auto w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

}  // namespace

auto gauss_legendre(int order) -> const Gauss_legendre_rule& {
  static std::mutex mutex;
  static std::map<int, Gauss_legendre_rule> cache;
  auto lock = std::scoped_lock{mutex};
  auto it = cache.find(order);
  if (it == cache.end()) {
    it = cache.emplace(order, build_rule(order)).first;
  }
  return it->second;
}

auto append_composite_rule(double a, double b, int panels, int order,
                           std::vector<double>& x, std::vector<double>& w) -> void {
  const auto& rule = gauss_legendre(order);
  auto width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    auto lo = a + p * width;
    auto half = 0.5 * width;
    auto mid = lo + half;
    for (int i = 0; i < order; ++i) {
      x.push_back(mid + half * rule.nodes[i]);
      w.push_back(half * rule.weights[i]);
    }
  }
}

}  // namespace lambda_infer
