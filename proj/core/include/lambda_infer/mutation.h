#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lambda_infer/rng.h"

namespace lambda_infer {

// Finite-alleles recurrent mutation: total rate theta per lineage, jump chain M
// with stationary law m.  Two representations share one interface:
//   * dense: an explicit d x d stochastic matrix, types labelled "0".."d-1";
//   * binary loci: d = 2^L haplotypes, each mutation flips one uniformly chosen
//     locus; types labelled by bit strings such as "1001001111".
class Mutation_model {
 public:
  static auto dense(double theta, Eigen::MatrixXd transition) -> Mutation_model;
  // M_ij = probs[j] for every i.
  static auto parent_independent(double theta, std::vector<double> probs) -> Mutation_model;
  static auto binary_loci(double theta, int loci) -> Mutation_model;

  auto theta() const -> double { return theta_; }
  auto num_types() const -> int { return num_types_; }
  auto is_binary_loci() const -> bool { return loci_ > 0; }
  auto loci() const -> int { return loci_; }

  auto stationary(int type) const -> double;
  auto stationary() const -> const std::vector<double>& { return stationary_; }
  auto transition(int from, int to) const -> double;  // M_{from,to}

  // Types j with M_{j,to} > 0, paired with M_{j,to}.
  auto predecessors(int to) const -> std::vector<std::pair<int, double>>;

  // Draws the type after one mutation event from `from`.
  auto mutate(int from, Rng& rng) const -> int;
  auto sample_stationary(Rng& rng) const -> int;

  // exp(theta t (M - I)) for dense models.
  auto branch_transition(double t) const -> Eigen::MatrixXd;
  // Per-locus probability that a locus is unchanged after time t (binary loci).
  auto locus_same_probability(double t) const -> double;

  auto type_label(int type) const -> std::string;
  auto parse_type(const std::string& label) const -> int;  // throws Data_error

  // Dense transition matrix; materialised for binary loci only when small.
  auto matrix() const -> Eigen::MatrixXd;

 private:
  Mutation_model() = default;

  double theta_ = 0.0;
  int num_types_ = 0;
  int loci_ = 0;
  Eigen::MatrixXd transition_;
  std::vector<double> stationary_;
  std::vector<std::vector<double>> cumulative_rows_;
};

}  // namespace lambda_infer
