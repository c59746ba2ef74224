#include "lambda_infer/measure.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "lambda_infer/errors.h"
#include "lambda_infer/gauss_legendre.h"

namespace lambda_infer {

namespace {

constexpr double k_mass_tolerance = 1e-12;
constexpr double k_kernel_reach = 12.0;  // kernels are integrated over mean +- 12 sd
constexpr int k_panel_order = 20;

// P(l <= Z <= u) for a standard normal Z, accurate in both tails.
auto normal_interval_probability(double l, double u) -> double {
  if (u <= l) return 0.0;
  constexpr auto r = std::numbers::sqrt2;
  if (l >= 0.0) return 0.5 * (std::erfc(l / r) - std::erfc(u / r));
  if (u <= 0.0) return 0.5 * (std::erfc(-u / r) - std::erfc(-l / r));
  return 1.0 - 0.5 * (std::erfc(-l / r) + std::erfc(u / r));
}

auto standard_normal_pdf(double z) -> double {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

auto log_beta(double a, double b) -> double {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

auto check_weight(double w, const char* what) -> void {
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw Domain_error{std::string{"negative or non-finite weight in "} + what};
  }
}

}  // namespace

Lambda_measure::Lambda_measure(double kingman_mass, std::vector<Atom> atoms,
                               std::vector<Normal_kernel> kernels,
                               std::vector<Beta_component> betas, double eta)
    : kingman_mass_{kingman_mass},
      atoms_{std::move(atoms)},
      kernels_{std::move(kernels)},
      betas_{std::move(betas)},
      eta_{eta} {
  if (!(eta_ > 0.0 && eta_ < 1.0)) throw Domain_error{"eta must lie in (0, 1)"};
  check_weight(kingman_mass_, "kingman mass");
  for (const auto& atom : atoms_) {
    check_weight(atom.weight, "atom");
    if (!(atom.location > 0.0 && atom.location <= 1.0)) {
      throw Domain_error{"atom locations must lie in (0, 1]; use kingman_mass for 0"};
    }
  }
  for (const auto& kernel : kernels_) {
    check_weight(kernel.weight, "kernel");
    if (!(kernel.sigma > 0.0) || !std::isfinite(kernel.location)) {
      throw Domain_error{"kernel sigma must be positive"};
    }
    if (!(kernel_normaliser(kernel, eta_) > 0.0)) {
      throw Domain_error{"kernel places no mass on [eta, 1]"};
    }
  }
  for (const auto& beta : betas_) {
    check_weight(beta.weight, "beta component");
    if (!(beta.a > 0.0 && beta.b > 0.0)) throw Domain_error{"beta shapes must be positive"};
  }
  if (std::abs(total_mass() - 1.0) > k_mass_tolerance) {
    throw Domain_error{"Lambda-measure must have total mass 1 (got " +
                       std::to_string(total_mass()) + ")"};
  }
}

auto Lambda_measure::kingman() -> Lambda_measure { return Lambda_measure{1.0, {}, {}}; }

auto Lambda_measure::star() -> Lambda_measure { return dirac(1.0); }

auto Lambda_measure::dirac(double x) -> Lambda_measure {
  if (x == 0.0) return kingman();
  return Lambda_measure{0.0, {{x, 1.0}}, {}};
}

auto Lambda_measure::uniform() -> Lambda_measure { return beta(1.0, 1.0); }

auto Lambda_measure::beta(double a, double b) -> Lambda_measure {
  return Lambda_measure{0.0, {}, {}, {{a, b, 1.0}}};
}

auto Lambda_measure::beta_coalescent(double alpha) -> Lambda_measure {
  if (!(alpha > 0.0 && alpha < 2.0)) throw Domain_error{"beta-coalescent alpha must be in (0, 2)"};
  return beta(2.0 - alpha, alpha);
}

auto Lambda_measure::eldon_wakeley(double psi) -> Lambda_measure {
  if (!(psi > 0.0 && psi <= 1.0)) throw Domain_error{"psi must lie in (0, 1]"};
  auto denom = 2.0 + psi * psi;
  return Lambda_measure{2.0 / denom, {{psi, psi * psi / denom}}, {}};
}

auto Lambda_measure::durrett_schweinsberg(double c) -> Lambda_measure {
  if (!(c >= 0.0 && c <= 1.0)) throw Domain_error{"c must lie in [0, 1]"};
  // Remaining mass 1 - c spread with density proportional to r.
  return Lambda_measure{c, {}, {}, {{2.0, 1.0, 1.0 - c}}};
}

auto Lambda_measure::kernel_mixture(std::vector<Normal_kernel> kernels, double eta)
    -> Lambda_measure {
  return Lambda_measure{0.0, {}, std::move(kernels), {}, eta};
}

auto Lambda_measure::total_mass() const -> double {
  auto total = kingman_mass_;
  for (const auto& atom : atoms_) total += atom.weight;
  for (const auto& kernel : kernels_) total += kernel.weight;
  for (const auto& beta : betas_) total += beta.weight;
  return total;
}

auto Lambda_measure::describe() const -> std::string {
  auto out = std::ostringstream{};
  out.precision(17);
  out << "kingman_mass=" << kingman_mass_;
  for (const auto& a : atoms_) out << " atom(" << a.location << "," << a.weight << ")";
  for (const auto& k : kernels_) {
    out << " kernel(" << k.location << "," << k.sigma << "," << k.weight << ")";
  }
  for (const auto& b : betas_) out << " beta(" << b.a << "," << b.b << "," << b.weight << ")";
  out << " eta=" << eta_;
  return out.str();
}

auto kernel_normaliser(const Normal_kernel& kernel, double eta) -> double {
  return normal_interval_probability((eta - kernel.location) / kernel.sigma,
                                     (1.0 - kernel.location) / kernel.sigma);
}

auto kernel_quadrature(const Normal_kernel& kernel, double eta, std::vector<double>& nodes,
                       std::vector<double>& weights) -> void {
  nodes.clear();
  weights.clear();
  auto lo = std::max(eta, kernel.location - k_kernel_reach * kernel.sigma);
  auto hi = std::min(1.0, kernel.location + k_kernel_reach * kernel.sigma);
  if (!(hi > lo)) return;
  auto panel_width = std::min(2.0 * kernel.sigma, 1.0 / 16.0);
  auto panels = std::clamp(static_cast<int>(std::ceil((hi - lo) / panel_width)), 1, 64);
  append_composite_rule(lo, hi, panels, k_panel_order, nodes, weights);
  auto scale = 1.0 / (kernel.sigma * kernel_normaliser(kernel, eta));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    weights[i] *= scale * standard_normal_pdf((nodes[i] - kernel.location) / kernel.sigma);
  }
}

auto moment(const Lambda_measure& measure, int k) -> double {
  if (k < 2) throw Domain_error{"moment index k must be >= 2"};
  if (k == 2) return 1.0;
  auto total = 0.0;
  for (const auto& atom : measure.atoms()) total += atom.weight * std::pow(atom.location, k - 2);
  auto nodes = std::vector<double>{};
  auto weights = std::vector<double>{};
  for (const auto& kernel : measure.kernels()) {
    kernel_quadrature(kernel, measure.eta(), nodes, weights);
    auto sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * std::pow(nodes[i], k - 2);
    total += kernel.weight * sum;
  }
  for (const auto& beta : measure.betas()) {
    // E[X^(k-2)] = prod_{j < k-2} (a + j) / (a + b + j)
    auto m = 1.0;
    for (int j = 0; j < k - 2; ++j) m *= (beta.a + j) / (beta.a + beta.b + j);
    total += beta.weight * m;
  }
  return total;
}

auto polynomial_moment(const Lambda_measure& measure, int p, int k) -> double {
  if (k < 2 || k > p) throw Domain_error{"polynomial moment requires 2 <= k <= p"};
  auto total = (k == 2) ? measure.kingman_mass() : 0.0;
  for (const auto& atom : measure.atoms()) {
    total += atom.weight * std::pow(1.0 - atom.location, p - k) * std::pow(atom.location, k - 2);
  }
  auto nodes = std::vector<double>{};
  auto weights = std::vector<double>{};
  for (const auto& kernel : measure.kernels()) {
    kernel_quadrature(kernel, measure.eta(), nodes, weights);
    auto sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      sum += weights[i] * std::pow(1.0 - nodes[i], p - k) * std::pow(nodes[i], k - 2);
    }
    total += kernel.weight * sum;
  }
  for (const auto& beta : measure.betas()) {
    total += beta.weight *
             std::exp(log_beta(beta.a + k - 2, beta.b + p - k) - log_beta(beta.a, beta.b));
  }
  return total;
}

auto total_merger_rate(const Lambda_measure& measure, int n) -> double {
  if (n < 2) throw Domain_error{"total merger rate requires n >= 2"};
  auto total = 0.0;
  auto binom = static_cast<double>(n) * (n - 1) / 2.0;  // C(n, 2)
  for (int k = 2; k <= n; ++k) {
    total += binom * polynomial_moment(measure, n, k);
    binom *= static_cast<double>(n - k) / (k + 1);
  }
  return total;
}

auto cumulative_mass(const Lambda_measure& measure, double x, bool include_x) -> double {
  if (x < 0.0 || (x == 0.0 && !include_x)) return 0.0;
  auto total = measure.kingman_mass();
  for (const auto& atom : measure.atoms()) {
    if (atom.location < x || (include_x && atom.location == x)) total += atom.weight;
  }
  for (const auto& kernel : measure.kernels()) {
    if (x <= measure.eta()) continue;
    if (x >= 1.0) {
      total += kernel.weight;
      continue;
    }
    auto z = kernel_normaliser(kernel, measure.eta());
    auto part = normal_interval_probability((measure.eta() - kernel.location) / kernel.sigma,
                                            (x - kernel.location) / kernel.sigma);
    total += kernel.weight * std::min(1.0, part / z);
  }
  for (const auto& beta : measure.betas()) {
    total += beta.weight * (x >= 1.0 ? 1.0 : boost::math::ibeta(beta.a, beta.b, x));
  }
  return total;
}

auto density(const Lambda_measure& measure, double r) -> double {
  auto total = 0.0;
  if (r >= measure.eta() && r <= 1.0) {
    for (const auto& kernel : measure.kernels()) {
      total += kernel.weight * standard_normal_pdf((r - kernel.location) / kernel.sigma) /
               (kernel.sigma * kernel_normaliser(kernel, measure.eta()));
    }
  }
  if (r > 0.0 && r < 1.0) {
    for (const auto& beta : measure.betas()) {
      total += beta.weight * std::exp((beta.a - 1.0) * std::log(r) +
                                      (beta.b - 1.0) * std::log1p(-r) - log_beta(beta.a, beta.b));
    }
  }
  return total;
}

auto truncated_normal_moments_by_recurrence(double mu, double sigma, double lo, double hi,
                                            int count) -> std::vector<double> {
  auto out = std::vector<double>(std::max(count, 0));
  if (count <= 0) return out;
  auto z = normal_interval_probability((lo - mu) / sigma, (hi - mu) / sigma);
  auto f_lo = standard_normal_pdf((lo - mu) / sigma) / (sigma * z);
  auto f_hi = standard_normal_pdf((hi - mu) / sigma) / (sigma * z);
  auto s2 = sigma * sigma;
  out[0] = 1.0;
  auto lo_pow = 1.0;  // lo^(j-1)
  auto hi_pow = 1.0;
  for (int j = 1; j < count; ++j) {
    auto prev2 = (j >= 2) ? out[j - 2] : 0.0;
    out[j] = mu * out[j - 1] + (j - 1) * s2 * prev2 - s2 * (hi_pow * f_hi - lo_pow * f_lo);
    lo_pow *= lo;
    hi_pow *= hi;
  }
  return out;
}

}  // namespace lambda_infer
