#pragma once

namespace lambda_infer {

enum class Two_allele_model { kingman, star };

// Stationary density of the type-1 frequency for two alleles with
// parent-independent mutation M_ij = 1/2 and total rate theta:
//   kingman: Beta(theta, theta);  star: (1/theta) |1 - 2x|^((1 - theta) / theta).
auto stationary_density_two_allele(Two_allele_model model, double theta, double x) -> double;

// E[Q(delta_0 | X)] under the stationary law of `generating`, where the prior puts
// mass 1/2 on each of delta_0 and delta_1 and X is the limiting allele frequency.
// Throws Numerical_error when adaptive quadrature misses its tolerance.
auto expected_limiting_posterior(double theta, Two_allele_model generating) -> double;

}  // namespace lambda_infer
