#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lambda_infer/errors.h"
#include "lambda_infer/gauss_legendre.h"
#include "lambda_infer/measure.h"
#include "lambda_infer/moment_space.h"
#include "lambda_infer/rates.h"
#include "lambda_infer/stationary.h"
#include "oracle_values.h"

using namespace lambda_infer;

namespace {

auto all_named() -> std::vector<Lambda_measure> {
  return {Lambda_measure::kingman(),
          Lambda_measure::star(),
          Lambda_measure::uniform(),
          Lambda_measure::dirac(0.3),
          Lambda_measure::beta_coalescent(1.5),
          Lambda_measure::eldon_wakeley(0.5),
          Lambda_measure::durrett_schweinsberg(0.3),
          Lambda_measure::kernel_mixture({{0.3, 0.1, 0.5}, {0.88, 0.24, 0.5}}),
          Lambda_measure{0.2, {{0.7, 0.3}}, {{0.4, 0.2, 0.25}}, {{2.0, 3.0, 0.25}}}};
}

}  // namespace

TEST(Moment, KingmanVanishesPastTwo) {
  EXPECT_EQ(moment(Lambda_measure::kingman(), 5), 0.0);
  EXPECT_EQ(moment(Lambda_measure::kingman(), 2), 1.0);
}

TEST(Moment, TableClosedForms) {
  auto psi = 0.5;
  auto c = 0.3;
  auto alpha = 1.5;
  for (int k = 3; k <= 12; ++k) {
    EXPECT_EQ(moment(Lambda_measure::kingman(), k), 0.0);
    EXPECT_NEAR(moment(Lambda_measure::star(), k), 1.0, 1e-12);
    EXPECT_NEAR(moment(Lambda_measure::uniform(), k), 1.0 / (k - 1), 1e-12);
    EXPECT_NEAR(moment(Lambda_measure::eldon_wakeley(psi), k), std::pow(psi, k) / (2 + psi * psi),
                1e-12);
    EXPECT_NEAR(moment(Lambda_measure::durrett_schweinsberg(c), k), 2.0 * (1 - c) / k, 1e-12);
    // E[x^(k-2)] under Beta(2 - alpha, alpha)
    auto beta = std::exp(std::lgamma(k - alpha) - std::lgamma(2 - alpha) - std::lgamma(k) +
                         std::lgamma(2.0));
    EXPECT_NEAR(moment(Lambda_measure::beta_coalescent(alpha), k), beta, 1e-12);
  }
}

TEST(Moment, EldonWakeleyExample) {
  EXPECT_NEAR(moment(Lambda_measure::eldon_wakeley(0.5), 3), 0.125 / 2.25, 1e-15);
}

TEST(Moment, KernelMomentsMatchOracle) {
  for (const auto& ref : oracle::k_kernel_moments) {
    auto m = Lambda_measure::kernel_mixture({{ref.location, ref.sigma, 1.0}});
    for (std::size_t i = 0; i < ref.values.size(); ++i) {
      auto k = oracle::k_kernel_moment_orders[i];
      EXPECT_NEAR(moment(m, k), ref.values[i], 1e-12 + 1e-10 * ref.values[i])
          << ref.location << " " << ref.sigma << " k=" << k;
    }
  }
}

TEST(Moment, RecurrenceAgreesWithQuadratureAtLowOrder) {
  auto kernel = Normal_kernel{0.4, 0.2, 1.0};
  auto rec = truncated_normal_moments_by_recurrence(0.4, 0.2, k_default_eta, 1.0, 8);
  auto m = Lambda_measure::kernel_mixture({kernel});
  for (int j = 1; j < 8; ++j) EXPECT_NEAR(rec[j], moment(m, j + 2), 1e-12);
}

TEST(Moment, NonIncreasingAndBounded) {
  for (const auto& m : all_named()) {
    auto prev = 1.0;
    for (int k = 2; k <= 40; ++k) {
      auto v = moment(m, k);
      EXPECT_GE(v, 0.0) << m.describe();
      EXPECT_LE(v, prev + 1e-15) << m.describe() << " k=" << k;
      prev = v;
    }
  }
}

TEST(PolynomialMoment, Examples) {
  auto kingman = Lambda_measure::kingman();
  auto star = Lambda_measure::star();
  for (int p = 2; p <= 8; ++p) {
    EXPECT_EQ(polynomial_moment(kingman, p, 2), 1.0);
    for (int k = 3; k <= p; ++k) EXPECT_EQ(polynomial_moment(kingman, p, k), 0.0);
    for (int k = 2; k <= p; ++k) EXPECT_NEAR(polynomial_moment(star, p, k), k == p ? 1.0 : 0.0, 1e-15);
  }
  EXPECT_NEAR(polynomial_moment(Lambda_measure::uniform(), 4, 3), 1.0 / 6.0, 1e-14);
}

TEST(PolynomialMoment, UniformIsBetaFunction) {
  for (int p = 2; p <= 30; ++p) {
    for (int k = 2; k <= p; ++k) {
      auto b = std::exp(std::lgamma(k - 1) + std::lgamma(p - k + 1) - std::lgamma(p));
      EXPECT_NEAR(polynomial_moment(Lambda_measure::uniform(), p, k), b, 1e-13 * (1 + b));
    }
  }
}

TEST(PolynomialMoment, MatchesBinomialTransformForDensityFreeMeasures) {
  auto measures = std::vector<Lambda_measure>{
      Lambda_measure::kingman(), Lambda_measure::star(), Lambda_measure::dirac(0.3),
      Lambda_measure::eldon_wakeley(0.5), Lambda_measure{0.1, {{0.2, 0.5}, {0.9, 0.4}}, {}}};
  for (const auto& m : measures) {
    auto seq = Moment_sequence::from_measure(m, 14);
    for (int p = 2; p <= 14; ++p) {
      for (int k = 2; k <= p; ++k) {
        EXPECT_NEAR(polynomial_moment(m, p, k), static_cast<double>(binomial_transform(seq, p, k)),
                    1e-10);
      }
    }
  }
}

TEST(TotalMergerRate, Examples) {
  EXPECT_NEAR(total_merger_rate(Lambda_measure::kingman(), 3), 3.0, 1e-15);
  EXPECT_NEAR(total_merger_rate(Lambda_measure::star(), 3), 1.0, 1e-15);
  EXPECT_NEAR(total_merger_rate(Lambda_measure::uniform(), 3), 2.0, 1e-14);
  EXPECT_NEAR(total_merger_rate(Lambda_measure::kingman(), 10), 45.0, 1e-12);
  // Bolthausen-Sznitman: n - 1
  EXPECT_NEAR(total_merger_rate(Lambda_measure::uniform(), 10), 9.0, 1e-12);
}

TEST(RateTable, AgreesWithPolynomialMoment) {
  for (const auto& m : all_named()) {
    auto table = Rate_table::from_measure(m, 25);
    for (int p = 2; p <= 25; ++p) {
      auto total = 0.0;
      for (int k = 2; k <= p; ++k) {
        EXPECT_NEAR(table.lambda(p, k), polynomial_moment(m, p, k), 1e-12) << m.describe();
        total += table.size_rate(p, k);
      }
      EXPECT_NEAR(table.total_rate(p), total, 1e-10 * total);
    }
  }
}

TEST(RateTable, FromMomentsMatchesFromMeasureAtSmallN) {
  auto m = Lambda_measure::uniform();
  auto a = Rate_table::from_measure(m, 10);
  auto b = Rate_table::from_moments(Moment_sequence::from_measure(m, 10), 10);
  for (int p = 2; p <= 10; ++p) {
    for (int k = 2; k <= p; ++k) EXPECT_NEAR(a.lambda(p, k), b.lambda(p, k), 1e-12);
  }
}

TEST(Measure, ConstructorEnforcesUnitMass) {
  EXPECT_THROW((Lambda_measure{0.5, {}, {}}), Domain_error);
  EXPECT_THROW((Lambda_measure{1.2, {{0.5, -0.2}}, {}}), Domain_error);
  EXPECT_THROW(Lambda_measure::dirac(1.5), Domain_error);
  EXPECT_NO_THROW((Lambda_measure{0.5, {{0.5, 0.5}}, {}}));
}

TEST(Measure, CumulativeMass) {
  auto m = Lambda_measure{0.2, {{0.5, 0.3}}, {}, {{1.0, 1.0, 0.5}}};
  EXPECT_NEAR(cumulative_mass(m, 0.0), 0.2, 1e-14);
  EXPECT_NEAR(cumulative_mass(m, 0.5, false), 0.2 + 0.25, 1e-12);
  EXPECT_NEAR(cumulative_mass(m, 0.5, true), 0.2 + 0.25 + 0.3, 1e-12);
  EXPECT_NEAR(cumulative_mass(m, 1.0), 1.0, 1e-12);
}

TEST(Measure, KernelDensityIntegratesToOne) {
  auto m = Lambda_measure::kernel_mixture({{0.05, 0.3, 0.6}, {0.9, 0.02, 0.4}});
  auto nodes = std::vector<double>{};
  auto weights = std::vector<double>{};
  auto total = 0.0;
  for (const auto& k : m.kernels()) {
    kernel_quadrature(k, m.eta(), nodes, weights);
    auto s = 0.0;
    for (auto w : weights) s += w;
    EXPECT_NEAR(s, 1.0, 1e-12);
    total += k.weight * s;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(cumulative_mass(m, 1.0), 1.0, 1e-10);
}

TEST(Stationary, DensityExamples) {
  for (auto x : {0.1, 0.37, 0.5, 0.9}) {
    EXPECT_NEAR(stationary_density_two_allele(Two_allele_model::kingman, 1.0, x), 1.0, 1e-14);
    EXPECT_NEAR(stationary_density_two_allele(Two_allele_model::star, 1.0, x), 1.0, 1e-14);
  }
  EXPECT_NEAR(stationary_density_two_allele(Two_allele_model::kingman, 0.5, 0.5),
              2.0 / std::numbers::pi, 1e-14);
}

TEST(Stationary, DensitiesIntegrateToOne) {
  // Symmetric about 1/2.  On [0, 1/4] x = u^(1/a); on [1/4, 1/2) 1 - 2x = w^b
  // down to 1 - 2x = y0, below which the tail is closed form (double x cannot
  // resolve the star singularity there).
  constexpr double y0 = 1e-6;
  for (auto theta : {0.04, 0.1, 0.5, 1.0, 5.0, 10.0, 17.0}) {
    for (auto model : {Two_allele_model::kingman, Two_allele_model::star}) {
      auto a = std::min(theta, 1.0);
      auto b = std::max(theta, 1.0);
      auto x = std::vector<double>{};
      auto w = std::vector<double>{};
      append_composite_rule(0.0, std::pow(0.25, a), 64, 20, x, w);
      auto total = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        auto u = x[i];
        total += w[i] * stationary_density_two_allele(model, theta, std::pow(u, 1.0 / a)) *
                 std::pow(u, 1.0 / a - 1.0) / a;
      }
      x.clear();
      w.clear();
      append_composite_rule(std::pow(y0, 1.0 / b), std::pow(0.5, 1.0 / b), 64, 20, x, w);
      for (std::size_t i = 0; i < x.size(); ++i) {
        auto y = std::pow(x[i], b);
        total += w[i] * stationary_density_two_allele(model, theta, 0.5 - y / 2.0) * b *
                 std::pow(x[i], b - 1.0) / 2.0;
      }
      if (model == Two_allele_model::star) {
        total += 0.5 * std::pow(y0, 1.0 / theta);
      } else {
        total += stationary_density_two_allele(model, theta, 0.5) * y0 / 2.0;
      }
      EXPECT_NEAR(2.0 * total, 1.0, 1e-8) << theta;
    }
  }
}

TEST(Stationary, LimitingPosteriorExamples) {
  EXPECT_NEAR(expected_limiting_posterior(1.0, Two_allele_model::kingman), 0.5, 1e-10);
  EXPECT_NEAR(expected_limiting_posterior(0.04, Two_allele_model::kingman), 0.84, 0.01);
  EXPECT_NEAR(expected_limiting_posterior(10.0, Two_allele_model::star), 0.25, 0.01);
}

TEST(Stationary, LimitingPosteriorMatchesOracle) {
  for (const auto& row : oracle::k_table1) {
    EXPECT_NEAR(expected_limiting_posterior(row.theta, Two_allele_model::kingman), row.e_kingman,
                1e-8);
    EXPECT_NEAR(expected_limiting_posterior(row.theta, Two_allele_model::star), row.e_star, 1e-8);
  }
}

TEST(Stationary, Complementarity) {
  for (auto theta : {0.04, 0.1, 0.5, 1.0, 2.5, 5.0, 10.0, 17.0}) {
    EXPECT_NEAR(expected_limiting_posterior(theta, Two_allele_model::kingman) +
                    expected_limiting_posterior(theta, Two_allele_model::star),
                1.0, 1e-8);
  }
}

TEST(Stationary, RejectsBadTheta) {
  EXPECT_THROW(expected_limiting_posterior(0.0, Two_allele_model::kingman), Domain_error);
  EXPECT_THROW(stationary_density_two_allele(Two_allele_model::star, 1.0, 1.5), Domain_error);
}
