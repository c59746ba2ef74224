#include "lambda_infer/mutation.h"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "lambda_infer/errors.h"

namespace lambda_infer {

namespace {

constexpr int k_max_binary_loci = 30;

auto solve_stationary(const Eigen::MatrixXd& m) -> std::vector<double> {
  // m^T pi = pi with sum(pi) = 1, solved as an overdetermined system.
  auto d = m.rows();
  auto a = Eigen::MatrixXd(d + 1, d);
  a.topRows(d) = m.transpose() - Eigen::MatrixXd::Identity(d, d);
  a.row(d).setOnes();
  auto rhs = Eigen::VectorXd::Zero(d + 1).eval();
  rhs(d) = 1.0;
  Eigen::VectorXd pi = a.colPivHouseholderQr().solve(rhs);
  auto residual = (m.transpose() * pi - pi).cwiseAbs().maxCoeff();
  if (residual > 1e-10) throw Domain_error{"mutation matrix has no unique stationary law"};
  return {pi.data(), pi.data() + d};
}

}  // namespace

auto Mutation_model::dense(double theta, Eigen::MatrixXd transition) -> Mutation_model {
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw Domain_error{"theta must be >= 0"};
  if (transition.rows() != transition.cols() || transition.rows() < 1) {
    throw Domain_error{"mutation matrix must be square"};
  }
  auto d = static_cast<int>(transition.rows());
  for (int i = 0; i < d; ++i) {
    if ((transition.row(i).array() < 0.0).any()) throw Domain_error{"negative mutation probability"};
    if (std::abs(transition.row(i).sum() - 1.0) > 1e-12) {
      throw Domain_error{"mutation matrix rows must sum to 1"};
    }
  }
  auto model = Mutation_model{};
  model.theta_ = theta;
  model.num_types_ = d;
  model.stationary_ = solve_stationary(transition);
  for (auto p : model.stationary_) {
    if (!(p > 0.0)) throw Domain_error{"stationary distribution must be strictly positive"};
  }
  model.cumulative_rows_.resize(d);
  for (int i = 0; i < d; ++i) {
    auto& row = model.cumulative_rows_[i];
    row.resize(d);
    auto acc = 0.0;
    for (int j = 0; j < d; ++j) row[j] = (acc += transition(i, j));
  }
  model.transition_ = std::move(transition);
  return model;
}

auto Mutation_model::parent_independent(double theta, std::vector<double> probs)
    -> Mutation_model {
  auto d = static_cast<int>(probs.size());
  auto m = Eigen::MatrixXd(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = probs[j];
  }
  return dense(theta, std::move(m));
}

auto Mutation_model::binary_loci(double theta, int loci) -> Mutation_model {
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw Domain_error{"theta must be >= 0"};
  if (loci < 1 || loci > k_max_binary_loci) throw Domain_error{"loci must be in [1, 30]"};
  auto model = Mutation_model{};
  model.theta_ = theta;
  model.loci_ = loci;
  model.num_types_ = 1 << loci;
  model.stationary_.assign(model.num_types_, 1.0 / model.num_types_);
  return model;
}

auto Mutation_model::stationary(int type) const -> double { return stationary_.at(type); }

auto Mutation_model::transition(int from, int to) const -> double {
  if (is_binary_loci()) {
    auto diff = static_cast<unsigned>(from ^ to);
    return (diff != 0 && (diff & (diff - 1)) == 0) ? 1.0 / loci_ : 0.0;
  }
  return transition_(from, to);
}

auto Mutation_model::predecessors(int to) const -> std::vector<std::pair<int, double>> {
  auto out = std::vector<std::pair<int, double>>{};
  if (is_binary_loci()) {
    out.reserve(loci_);
    for (int l = 0; l < loci_; ++l) out.emplace_back(to ^ (1 << l), 1.0 / loci_);
    return out;
  }
  for (int j = 0; j < num_types_; ++j) {
    if (transition_(j, to) > 0.0) out.emplace_back(j, transition_(j, to));
  }
  return out;
}

auto Mutation_model::mutate(int from, Rng& rng) const -> int {
  if (is_binary_loci()) {
    auto locus = static_cast<int>(uniform_open(rng) * loci_);
    return from ^ (1 << std::min(locus, loci_ - 1));
  }
  const auto& row = cumulative_rows_[from];
  auto u = uniform_open(rng) * row.back();
  auto it = std::upper_bound(row.begin(), row.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - row.begin(), num_types_ - 1));
}

auto Mutation_model::sample_stationary(Rng& rng) const -> int {
  if (is_binary_loci()) {
    return static_cast<int>(rng() >> (64 - loci_));
  }
  auto u = uniform_open(rng);
  auto acc = 0.0;
  for (int i = 0; i < num_types_; ++i) {
    acc += stationary_[i];
    if (u < acc) return i;
  }
  return num_types_ - 1;
}

auto Mutation_model::branch_transition(double t) const -> Eigen::MatrixXd {
  if (is_binary_loci()) throw Domain_error{"branch_transition is only materialised for dense models"};
  auto d = num_types_;
  Eigen::MatrixXd generator = theta_ * t * (transition_ - Eigen::MatrixXd::Identity(d, d));
  return generator.exp();
}

auto Mutation_model::locus_same_probability(double t) const -> double {
  // Each locus flips at rate theta / L; a two-state chain with symmetric rate r
  // stays put with probability (1 + exp(-2 r t)) / 2.
  return 0.5 * (1.0 + std::exp(-2.0 * theta_ * t / loci_));
}

auto Mutation_model::type_label(int type) const -> std::string {
  if (is_binary_loci()) {
    auto s = std::string(loci_, '0');
    for (int l = 0; l < loci_; ++l) {
      if (type & (1 << l)) s[l] = '1';
    }
    return s;
  }
  return std::to_string(type);
}

auto Mutation_model::parse_type(const std::string& label) const -> int {
  if (is_binary_loci()) {
    if (static_cast<int>(label.size()) != loci_) {
      throw Data_error{"haplotype '" + label + "' does not have " + std::to_string(loci_) + " loci"};
    }
    auto type = 0;
    for (int l = 0; l < loci_; ++l) {
      if (label[l] == '1') {
        type |= (1 << l);
      } else if (label[l] != '0') {
        throw Data_error{"haplotype '" + label + "' is not a binary string"};
      }
    }
    return type;
  }
  auto pos = std::size_t{0};
  auto type = -1;
  try {
    type = std::stoi(label, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != label.size() || type < 0 || type >= num_types_) {
    throw Data_error{"type label '" + label + "' is not in 0.." + std::to_string(num_types_ - 1)};
  }
  return type;
}

auto Mutation_model::matrix() const -> Eigen::MatrixXd {
  if (!is_binary_loci()) return transition_;
  if (num_types_ > 4096) throw Capacity_error{"binary-loci matrix too large to materialise"};
  auto m = Eigen::MatrixXd::Zero(num_types_, num_types_).eval();
  for (int i = 0; i < num_types_; ++i) {
    for (int l = 0; l < loci_; ++l) m(i, i ^ (1 << l)) = 1.0 / loci_;
  }
  return m;
}

}  // namespace lambda_infer
