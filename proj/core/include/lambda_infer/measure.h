#pragma once

#include <string>
#include <vector>

namespace lambda_infer {

inline constexpr double k_default_eta = 1e-6;

struct Atom {
  double location;  // in (0, 1]
  double weight;
};

// Normal density centred at `location` with standard deviation `sigma`,
// truncated to [eta, 1] and renormalised there.
struct Normal_kernel {
  double location;
  double sigma;
  double weight;
};

// Beta(a, b) density on [0, 1].
struct Beta_component {
  double a;
  double b;
  double weight;
};

// A probability measure on [0, 1] governing multiple-merger sizes:
// a point mass at 0 (the Kingman part), finitely many atoms on (0, 1] and an
// absolutely continuous part made of truncated-normal kernels and Beta
// densities.  The constructor enforces unit total mass and nonnegativity.
class Lambda_measure {
 public:
  Lambda_measure(double kingman_mass, std::vector<Atom> atoms, std::vector<Normal_kernel> kernels,
                 std::vector<Beta_component> betas = {}, double eta = k_default_eta);

  static auto kingman() -> Lambda_measure;                // delta_0
  static auto star() -> Lambda_measure;                   // delta_1
  static auto dirac(double x) -> Lambda_measure;
  static auto uniform() -> Lambda_measure;                // Bolthausen-Sznitman
  static auto beta(double a, double b) -> Lambda_measure;
  static auto beta_coalescent(double alpha) -> Lambda_measure;  // Beta(2 - alpha, alpha)
  static auto eldon_wakeley(double psi) -> Lambda_measure;
  static auto durrett_schweinsberg(double c) -> Lambda_measure;
  static auto kernel_mixture(std::vector<Normal_kernel> kernels, double eta = k_default_eta)
      -> Lambda_measure;

  auto kingman_mass() const -> double { return kingman_mass_; }
  auto atoms() const -> const std::vector<Atom>& { return atoms_; }
  auto kernels() const -> const std::vector<Normal_kernel>& { return kernels_; }
  auto betas() const -> const std::vector<Beta_component>& { return betas_; }
  auto eta() const -> double { return eta_; }
  auto total_mass() const -> double;

  auto describe() const -> std::string;

 private:
  double kingman_mass_;
  std::vector<Atom> atoms_;
  std::vector<Normal_kernel> kernels_;
  std::vector<Beta_component> betas_;
  double eta_;
};

// lambda_k = integral of x^(k-2) Lambda(dx); lambda_2 = 1.
auto moment(const Lambda_measure& measure, int k) -> double;

// lambda_{p,k}: rate at which any particular k of p blocks merge.
auto polynomial_moment(const Lambda_measure& measure, int p, int k) -> double;

// -q_{nn}: total rate of any merger among n blocks.
auto total_merger_rate(const Lambda_measure& measure, int n) -> double;

// Lambda([0, x]) when include_x, otherwise Lambda([0, x)).
auto cumulative_mass(const Lambda_measure& measure, double x, bool include_x = true) -> double;

// Density of the absolutely continuous part at r.
auto density(const Lambda_measure& measure, double r) -> double;

// Normaliser of a kernel on [eta, 1]: P(eta <= N(location, sigma^2) <= 1).
auto kernel_normaliser(const Normal_kernel& kernel, double eta) -> double;

// Quadrature nodes/weights for integrating f(r) q(r) dr over [eta, 1], where q is
// the (probability) density of the kernel.  Weights sum to 1 up to rounding.
auto kernel_quadrature(const Normal_kernel& kernel, double eta, std::vector<double>& nodes,
                       std::vector<double>& weights) -> void;

// Raw moments E[X^j], j = 0..count-1, of N(mu, sigma^2) truncated to [lo, hi]
// by the two-term recurrence
//   M_j = mu M_{j-1} + (j-1) sigma^2 M_{j-2} - sigma^2 (hi^{j-1} q(hi) - lo^{j-1} q(lo)).
// Only stable for modest j; the quadrature route is used in production.
auto truncated_normal_moments_by_recurrence(double mu, double sigma, double lo, double hi,
                                            int count) -> std::vector<double>;

}  // namespace lambda_infer
