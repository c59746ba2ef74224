#include "lambda_infer/likelihood.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <optional>
#include <thread>

#include <Eigen/SparseLU>

#include "lambda_infer/errors.h"

namespace lambda_infer {

namespace {

constexpr double k_neg_inf = -std::numeric_limits<double>::infinity();

auto log_binomial(int n, int k) -> double {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

auto count_of(const Type_counts& c, int type) -> int {
  auto it = std::lower_bound(c.begin(), c.end(), std::pair{type, 0},
                             [](const auto& a, const auto& b) { return a.first < b.first; });
  return (it != c.end() && it->first == type) ? it->second : 0;
}

auto add_count(Type_counts& c, int type, int delta) -> void {
  auto it = std::lower_bound(c.begin(), c.end(), std::pair{type, 0},
                             [](const auto& a, const auto& b) { return a.first < b.first; });
  if (it != c.end() && it->first == type) {
    it->second += delta;
    if (it->second == 0) c.erase(it);
  } else if (delta != 0) {
    c.insert(it, {type, delta});
  }
}

// Predecessor lists for dense models, computed once per estimate.
class Predecessors {
 public:
  explicit Predecessors(const Mutation_model& mutation) : mutation_{mutation} {
    if (!mutation.is_binary_loci()) {
      lists_.resize(mutation.num_types());
      for (int i = 0; i < mutation.num_types(); ++i) lists_[i] = mutation.predecessors(i);
    }
  }

  template <typename F>
  auto for_each(int to, F&& f) const -> void {
    if (mutation_.is_binary_loci()) {
      auto p = 1.0 / mutation_.loci();
      for (int l = 0; l < mutation_.loci(); ++l) f(to ^ (1 << l), p);
    } else {
      for (const auto& [from, prob] : lists_[to]) f(from, prob);
    }
  }

 private:
  const Mutation_model& mutation_;
  std::vector<std::vector<std::pair<int, double>>> lists_;
};

// Approximate conditional sampling probabilities pi(beta | c): draw a type
// from c, then a geometric number of mutations along M, each before the new
// lineage joins a merger with probability theta / (g(n) + theta).  g(n) is the
// rate of mergers involving one extra lineage among n + 1; g(n) = n for Kingman.
class Conditional_approximation {
 public:
  Conditional_approximation(const Rate_table& rates, const Mutation_model& mutation, int n_max)
      : mutation_{mutation}, n_max_{n_max} {
    auto theta = mutation.theta();
    auto keep = std::vector<double>(n_max + 1, 1.0);
    join_rate_.assign(n_max + 1, 0.0);
    for (int n = 1; n <= n_max; ++n) {
      auto m = std::min(n, rates.n_max() - 1);
      auto g = 0.0;
      if (m < 1) {
        g = n;
      } else {
        for (int k = 2; k <= m + 1; ++k) g += binomial(m, k - 1) * rates.lambda(m + 1, k);
      }
      keep[n] = theta > 0.0 ? theta / (g + theta) : 0.0;
      join_rate_[n] = g;
    }
    if (mutation.is_binary_loci()) {
      // Only the Hamming distance matters; its jump chain is a birth-death
      // walk on 0..L.
      auto loci = mutation.loci();
      by_distance_.resize(n_max + 1);
      for (int n = 1; n <= n_max; ++n) {
        auto r = keep[n];
        auto a = Eigen::MatrixXd::Identity(loci + 1, loci + 1).eval();
        for (int d = 0; d <= loci; ++d) {
          if (d > 0) a(d - 1, d) -= r * d / loci;
          if (d < loci) a(d + 1, d) -= r * (loci - d) / static_cast<double>(loci);
        }
        auto rhs = Eigen::VectorXd::Zero(loci + 1).eval();
        rhs(0) = 1.0 - r;
        Eigen::VectorXd x = a.partialPivLu().solve(rhs);
        auto& row = by_distance_[n];
        row.resize(loci + 1);
        for (int d = 0; d <= loci; ++d) row[d] = std::max(0.0, x(d)) / binomial(loci, d);
      }
      available_ = true;
    } else if (mutation.num_types() <= k_max_dense_types) {
      auto m = mutation.matrix();
      auto d = mutation.num_types();
      resolvent_.resize(n_max + 1);
      for (int n = 1; n <= n_max; ++n) {
        auto r = keep[n];
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d) - r * m;
        resolvent_[n] = (1.0 - r) * a.inverse();
      }
      available_ = true;
    }
  }

  auto available() const -> bool { return available_; }
  auto join_rate(int n) const -> double { return join_rate_[std::clamp(n, 1, n_max_)]; }

  // pi(beta | c - removed * e_type + extra), where extra holds weighted counts
  // of batches still to be inserted further back in time.
  auto operator()(const Type_counts& c, int p, int type, int removed, int beta,
                  const std::vector<std::pair<int, double>>& extra, double extra_size) const
      -> double {
    auto n = (p - removed) + extra_size;
    auto index = std::clamp(static_cast<int>(std::lround(n)), 1, n_max_);
    auto total = 0.0;
    for (const auto& [alpha, count] : c) {
      auto k = count - (alpha == type ? removed : 0);
      if (k > 0) total += k * kernel(index, alpha, beta);
    }
    for (const auto& [alpha, weight] : extra) total += weight * kernel(index, alpha, beta);
    return total / n;
  }

 private:
  static constexpr int k_max_dense_types = 64;

  auto kernel(int n, int alpha, int beta) const -> double {
    if (mutation_.is_binary_loci()) {
      return by_distance_[n][std::popcount(static_cast<unsigned>(alpha ^ beta))];
    }
    return resolvent_[n](alpha, beta);
  }

  const Mutation_model& mutation_;
  int n_max_;
  bool available_ = false;
  std::vector<double> join_rate_;
  std::vector<std::vector<double>> by_distance_;
  std::vector<Eigen::MatrixXd> resolvent_;
};

struct Term {
  bool merge;
  int type;   // the type that loses lineages
  int other;  // mutation: predecessor type; merge: k
  double coef;
  double guide;
};

// Share of the proposal kept proportional to the raw coefficients so that every
// admissible event has positive probability and weights stay bounded.
constexpr double k_defensive_share = 0.01;
constexpr long k_max_events = 100'000'000;
constexpr double k_future_weight = 2.0;
constexpr double k_future_decay = 8.0;

auto importance_particle(const Rate_table& rates, const Typed_data& data,
                         const Mutation_model& mutation, const Predecessors& preds,
                         const Conditional_approximation& approx, Rng& rng) -> double {
  auto c = Type_counts{};
  auto p = 0;
  auto s = 0.0;
  auto log_w = 0.0;
  auto theta = mutation.theta();
  auto terms = std::vector<Term>{};
  const auto& batches = data.batches;
  auto guided = approx.available();

  auto insert = [&](const Typed_batch& batch) {
    // The batch and the p ancestral lineages are an exchangeable split of
    // p + size individuals: multivariate hypergeometric factor.
    for (const auto& [type, count] : batch.counts) {
      log_w += log_binomial(count_of(c, type) + count, count);
      add_count(c, type, count);
    }
    log_w -= log_binomial(p + batch.size, batch.size);
    p += batch.size;
  };

  auto extra = std::vector<std::pair<int, double>>{};
  auto extra_size = 0.0;
  // Batches not yet inserted, discounted by how far back they lie.
  auto refresh_extra = [&](std::size_t from) {
    extra.clear();
    extra_size = 0.0;
    for (auto b = from; b < batches.size(); ++b) {
      auto weight = k_future_weight * std::exp(-k_future_decay * approx.join_rate(p) / p *
                                               (batches[b].backward_time - s));
      for (const auto& [type, count] : batches[b].counts) {
        extra.emplace_back(type, weight * count);
      }
      extra_size += weight * batches[b].size;
    }
  };

  insert(batches[0]);
  auto next = std::size_t{1};
  for (long events = 0;; ++events) {
    if (events > k_max_events) {
      throw Numerical_error{"importance sampler did not reach the root", 0.0};
    }
    if (p == 1 && next == batches.size()) {
      return log_w + std::log(mutation.stationary(c.front().first));
    }
    auto rho = p * theta + rates.total_rate(p);
    auto wait = rho > 0.0 ? -std::log(uniform_open(rng)) / rho
                          : std::numeric_limits<double>::infinity();
    if (next < batches.size() && s + wait >= batches[next].backward_time) {
      s = batches[next].backward_time;
      insert(batches[next++]);
      continue;
    }
    if (!(rho > 0.0)) return k_neg_inf;
    s += wait;

    terms.clear();
    auto total = 0.0;
    auto guide_total = 0.0;
    refresh_extra(next);
    auto pi = [&](int type, int removed, int beta) {
      return approx(c, p, type, removed, beta, extra, extra_size);
    };
    for (const auto& [type, count] : c) {
      if (theta > 0.0) {
        auto own = guided ? pi(type, 1, type) : 1.0;
        preds.for_each(type, [&](int from, double prob) {
          auto parents = count_of(c, from) + (from == type ? 0 : 1);
          auto coef = theta * parents * prob;
          if (coef > 0.0) {
            auto guide = coef;
            if (guided && from != type) {
              guide = own > 0.0 ? theta * prob * count * pi(type, 1, from) / own : 0.0;
            }
            terms.push_back({false, type, from, coef, guide});
            total += coef;
            guide_total += guide;
          }
        });
      }
      auto log_chain = 0.0;  // sum of log pi(type | c - m e_type), m < k
      for (int k = 2; k <= count; ++k) {
        if (guided) log_chain += std::log(pi(type, k - 1, type));
        auto coef = rates.size_rate(p, k) * (count - k + 1) / (p - k + 1);
        if (coef > 0.0) {
          auto guide = coef;
          if (guided) {
            guide = std::exp(std::log(rates.lambda(p, k)) + log_binomial(count, k) - log_chain);
          }
          terms.push_back({true, type, k, coef, guide});
          total += coef;
          guide_total += guide;
        }
      }
    }
    if (!(total > 0.0)) return k_neg_inf;
    auto use_guide = guided && guide_total > 0.0 && std::isfinite(guide_total);
    auto share = use_guide ? k_defensive_share : 1.0;
    auto proposal = [&](const Term& t) {
      return share * t.coef / total + (use_guide ? (1.0 - share) * t.guide / guide_total : 0.0);
    };
    auto u = uniform_open(rng);
    auto chosen = terms.size() - 1;
    auto acc = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      acc += proposal(terms[t]);
      if (u < acc) {
        chosen = t;
        break;
      }
    }
    const auto term = terms[chosen];
    log_w += std::log(term.coef / (rho * proposal(term)));
    if (term.merge) {
      add_count(c, term.type, -(term.other - 1));
      p -= term.other - 1;
    } else if (term.other != term.type) {
      add_count(c, term.type, -1);
      add_count(c, term.other, 1);
    }
  }
}

// Multinomial factor turning a labelled leaf assignment into unordered counts.
auto log_label_factor(const Typed_data& data) -> double {
  auto total = 0.0;
  for (const auto& batch : data.batches) {
    total += std::lgamma(batch.size + 1.0);
    for (const auto& [type, count] : batch.counts) total -= std::lgamma(count + 1.0);
  }
  return total;
}

auto schedule_of(const Typed_data& data) -> Sampling_schedule {
  // Forward times with the oldest batch at 0.
  auto out = std::vector<Sampling_batch>{};
  auto oldest = data.batches.back().backward_time;
  for (auto it = data.batches.rbegin(); it != data.batches.rend(); ++it) {
    out.push_back({oldest - it->backward_time, it->size});
  }
  return Sampling_schedule{std::move(out)};
}

// Leaf types in genealogy order: forward-time batch order, counts expanded.
auto leaf_types(const Typed_data& data) -> std::vector<int> {
  auto types = std::vector<int>{};
  for (auto it = data.batches.rbegin(); it != data.batches.rend(); ++it) {
    for (const auto& [type, count] : it->counts) types.insert(types.end(), count, type);
  }
  return types;
}

auto peel_binary_loci(const Genealogy& g, const std::vector<int>& leaves,
                      const Mutation_model& mutation) -> double {
  auto loci = mutation.loci();
  auto n = g.nodes.size();
  // partial[node * loci + l] = {P(data below | state 0), P(data below | state 1)}
  auto partial = std::vector<std::array<double, 2>>(n * loci, {1.0, 1.0});
  for (std::size_t v = 0; v < leaves.size(); ++v) {
    for (int l = 0; l < loci; ++l) {
      auto bit = (leaves[v] >> l) & 1;
      partial[v * loci + l] = {bit ? 0.0 : 1.0, bit ? 1.0 : 0.0};
    }
  }
  auto log_scale = 0.0;
  for (std::size_t v = leaves.size(); v < n; ++v) {
    const auto& node = g.nodes[v];
    for (auto child : node.children) {
      auto same = mutation.locus_same_probability(node.time - g.nodes[child].time);
      for (int l = 0; l < loci; ++l) {
        const auto& q = partial[child * loci + l];
        auto& out = partial[v * loci + l];
        out[0] *= same * q[0] + (1.0 - same) * q[1];
        out[1] *= same * q[1] + (1.0 - same) * q[0];
      }
    }
    for (int l = 0; l < loci; ++l) {
      auto& out = partial[v * loci + l];
      auto scale = std::max(out[0], out[1]);
      if (scale <= 0.0) return k_neg_inf;
      out[0] /= scale;
      out[1] /= scale;
      log_scale += std::log(scale);
    }
  }
  auto total = log_scale;
  for (int l = 0; l < loci; ++l) {
    const auto& r = partial[g.root * loci + l];
    total += std::log(0.5 * (r[0] + r[1]));
  }
  return total;
}

auto peel_dense(const Genealogy& g, const std::vector<int>& leaves, const Mutation_model& mutation)
    -> double {
  auto d = mutation.num_types();
  auto n = g.nodes.size();
  auto partial = std::vector<Eigen::VectorXd>(n, Eigen::VectorXd::Ones(d));
  for (std::size_t v = 0; v < leaves.size(); ++v) {
    partial[v].setZero();
    partial[v](leaves[v]) = 1.0;
  }
  auto log_scale = 0.0;
  for (std::size_t v = leaves.size(); v < n; ++v) {
    const auto& node = g.nodes[v];
    for (auto child : node.children) {
      auto transition = mutation.branch_transition(node.time - g.nodes[child].time);
      partial[v] = partial[v].cwiseProduct(transition * partial[child]);
    }
    auto scale = partial[v].maxCoeff();
    if (scale <= 0.0) return k_neg_inf;
    partial[v] /= scale;
    log_scale += std::log(scale);
  }
  auto root = 0.0;
  for (int i = 0; i < d; ++i) root += mutation.stationary(i) * partial[g.root](i);
  return root > 0.0 ? log_scale + std::log(root) : k_neg_inf;
}

auto summarise(const std::vector<double>& log_w, std::uint64_t seed) -> Likelihood_estimate {
  auto est = Likelihood_estimate{};
  est.particles = static_cast<int>(log_w.size());
  est.seed = seed;
  est.log_value = log_mean_exp(log_w);
  est.value = std::exp(est.log_value);
  est.zero = !std::isfinite(est.log_value);
  if (est.zero || log_w.size() < 2) {
    est.log_variance = est.zero ? std::numeric_limits<double>::infinity() : 0.0;
    est.standard_error = 0.0;
    if (log_w.size() < 2 && !est.zero) est.log_variance = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  // Relative sample variance of the weights, in units of the mean.
  auto ss = 0.0;
  for (auto l : log_w) {
    auto r = std::exp(l - est.log_value) - 1.0;
    ss += r * r;
  }
  auto p = static_cast<double>(log_w.size());
  auto relative_var = ss / (p - 1.0);
  est.log_variance = relative_var / p;
  est.standard_error = est.value * std::sqrt(relative_var / p);
  return est;
}

auto compositions(int m, int d) -> std::vector<std::vector<int>> {
  auto out = std::vector<std::vector<int>>{};
  auto current = std::vector<int>(d, 0);
  auto recurse = [&](auto&& self, int index, int remaining) -> void {
    if (index == d - 1) {
      current[index] = remaining;
      out.push_back(current);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      current[index] = v;
      self(self, index + 1, remaining - v);
    }
  };
  recurse(recurse, 0, m);
  return out;
}

auto check_configuration_budget(int n, int d) -> void {
  auto total = 0.0;
  for (int m = 1; m <= n; ++m) total += binomial(m + d - 1, d - 1);
  if (total > static_cast<double>(k_max_exact_configurations)) {
    throw Capacity_error{"exact likelihood needs " + std::to_string(total) +
                         " configurations (limit 1e6)"};
  }
}

struct Level {
  std::vector<std::vector<int>> configs;
  std::map<std::vector<int>, int> index;
  std::vector<double> prob;
};

auto solve_levels(const Rate_table& rates, int n, const Mutation_model& mutation)
    -> std::vector<Level> {
  auto d = mutation.num_types();
  check_configuration_budget(n, d);
  if (n > 1 && rates.n_max() < n) throw Domain_error{"rate table smaller than the sample"};
  auto theta = mutation.theta();
  auto levels = std::vector<Level>(n + 1);
  for (int m = 1; m <= n; ++m) {
    auto& level = levels[m];
    level.configs = compositions(m, d);
    for (int c = 0; c < static_cast<int>(level.configs.size()); ++c) {
      level.index[level.configs[c]] = c;
    }
    auto size = static_cast<int>(level.configs.size());
    level.prob.assign(size, 0.0);
    if (m == 1) {
      for (int c = 0; c < size; ++c) {
        auto type = static_cast<int>(std::find(level.configs[c].begin(), level.configs[c].end(), 1) -
                                     level.configs[c].begin());
        level.prob[c] = mutation.stationary(type);
      }
      continue;
    }
    auto triplets = std::vector<Eigen::Triplet<double>>{};
    auto rhs = Eigen::VectorXd(size);
    auto rho = m * theta + rates.total_rate(m);
    for (int c = 0; c < size; ++c) {
      const auto& config = level.configs[c];
      triplets.emplace_back(c, c, rho);
      auto b = 0.0;
      auto target = config;
      for (int i = 0; i < d; ++i) {
        if (config[i] == 0) continue;
        if (theta > 0.0) {
          for (int j = 0; j < d; ++j) {
            auto prob = mutation.transition(j, i);
            if (prob == 0.0) continue;
            auto parents = config[j] + (i == j ? 0 : 1);
            target[i] -= 1;
            target[j] += 1;
            triplets.emplace_back(c, level.index.at(target), -theta * parents * prob);
            target[i] += 1;
            target[j] -= 1;
          }
        }
        for (int k = 2; k <= config[i]; ++k) {
          auto coef = rates.size_rate(m, k) * (config[i] - k + 1) / (m - k + 1);
          if (coef == 0.0) continue;
          target[i] -= k - 1;
          const auto& lower = levels[m - k + 1];
          b += coef * lower.prob[lower.index.at(target)];
          target[i] += k - 1;
        }
      }
      rhs(c) = b;
    }
    auto a = Eigen::SparseMatrix<double>(size, size);
    a.setFromTriplets(triplets.begin(), triplets.end());
    auto solver = Eigen::SparseLU<Eigen::SparseMatrix<double>>{};
    solver.compute(a);
    if (solver.info() != Eigen::Success) {
      throw Numerical_error{"sampling recursion system is singular", 0.0};
    }
    Eigen::VectorXd x = solver.solve(rhs);
    for (int c = 0; c < size; ++c) level.prob[c] = std::max(0.0, x(c));
  }
  return levels;
}

}  // namespace

auto log_mean_exp(const std::vector<double>& x) -> double {
  if (x.empty()) return k_neg_inf;
  auto peak = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(peak)) return peak;
  auto sum = 0.0;
  for (auto v : x) sum += std::exp(v - peak);
  return peak + std::log(sum / static_cast<double>(x.size()));
}

auto prepare_data(const Time_series_data& data, const Mutation_model& mutation) -> Typed_data {
  if (data.batches.empty()) throw Data_error{"dataset has no batches"};
  auto out = Typed_data{};
  auto last = data.batches.back().time;
  for (auto it = data.batches.rbegin(); it != data.batches.rend(); ++it) {
    auto batch = Typed_batch{last - it->time, {}, 0};
    for (const auto& [label, count] : it->counts) {
      if (count <= 0) throw Data_error{"counts must be positive"};
      add_count(batch.counts, mutation.parse_type(label), count);
      batch.size += count;
    }
    out.total_size += batch.size;
    out.batches.push_back(std::move(batch));
  }
  return out;
}

auto exact_likelihood_table(const Rate_table& rates, int n, const Mutation_model& mutation)
    -> std::map<std::vector<int>, double> {
  if (n < 1) throw Domain_error{"sample size must be >= 1"};
  auto levels = solve_levels(rates, n, mutation);
  auto out = std::map<std::vector<int>, double>{};
  for (std::size_t c = 0; c < levels[n].configs.size(); ++c) {
    out[levels[n].configs[c]] = levels[n].prob[c];
  }
  return out;
}

auto exact_likelihood(const Rate_table& rates, const std::vector<int>& counts,
                      const Mutation_model& mutation) -> double {
  if (static_cast<int>(counts.size()) != mutation.num_types()) {
    throw Domain_error{"counts must have one entry per type"};
  }
  auto n = 0;
  for (auto c : counts) {
    if (c < 0) throw Domain_error{"counts must be nonnegative"};
    n += c;
  }
  if (n < 1) throw Domain_error{"sample size must be >= 1"};
  auto levels = solve_levels(rates, n, mutation);
  return levels[n].prob[levels[n].index.at(counts)];
}

auto exact_likelihood(const Lambda_measure& measure, const std::vector<int>& counts,
                      const Mutation_model& mutation) -> double {
  auto n = 0;
  for (auto c : counts) n += std::max(c, 0);
  return exact_likelihood(Rate_table::from_measure(measure, std::max(2, n)), counts, mutation);
}

auto exact_likelihood(const Moment_sequence& moments, const std::vector<int>& counts,
                      const Mutation_model& mutation) -> double {
  if (!check_complete_monotonicity(moments).monotone) {
    throw Domain_error{"moment sequence is not completely monotonic"};
  }
  auto n = 0;
  for (auto c : counts) n += std::max(c, 0);
  if (n > moments.n()) throw Domain_error{"sample larger than the moment sequence supports"};
  return exact_likelihood(Rate_table::from_moments(moments, std::max(2, n)), counts, mutation);
}

auto particle_log_weights(const Rate_table& rates, const Typed_data& data,
                          const Mutation_model& mutation, const Estimator_options& options)
    -> std::vector<double> {
  if (options.particles < 1) throw Domain_error{"particles must be >= 1"};
  if (data.batches.empty()) throw Data_error{"dataset has no batches"};
  if (rates.n_max() < data.total_size && data.total_size > 1) {
    throw Domain_error{"rate table smaller than the sample"};
  }
  auto out = std::vector<double>(options.particles);
  auto preds = Predecessors{mutation};
  auto approx = std::optional<Conditional_approximation>{};
  auto schedule = std::optional<Sampling_schedule>{};
  auto leaves = std::vector<int>{};
  auto label_factor = 0.0;
  if (options.kind == Estimator_kind::importance_sampling) {
    approx.emplace(rates, mutation, std::max(1, data.total_size));
  } else {
    schedule.emplace(schedule_of(data));
    leaves = leaf_types(data);
    label_factor = log_label_factor(data);
  }
  auto run = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      auto rng = make_rng(options.seed, static_cast<std::uint64_t>(i));
      if (options.kind == Estimator_kind::importance_sampling) {
        out[i] = importance_particle(rates, data, mutation, preds, *approx, rng);
      } else {
        auto g = simulate_coalescent_tree(rates, *schedule, rng);
        auto log_l = mutation.is_binary_loci() ? peel_binary_loci(g, leaves, mutation)
                                               : peel_dense(g, leaves, mutation);
        out[i] = log_l + label_factor;
      }
    }
  };
  auto threads = std::clamp(options.threads, 1, options.particles);
  if (threads == 1) {
    run(0, options.particles);
  } else {
    auto workers = std::vector<std::thread>{};
    auto failures = std::vector<std::exception_ptr>(threads);
    auto chunk = (options.particles + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      auto begin = t * chunk;
      auto end = std::min(options.particles, begin + chunk);
      if (begin < end) {
        workers.emplace_back([&, t, begin, end] {
          try {
            run(begin, end);
          } catch (...) {
            failures[t] = std::current_exception();
          }
        });
      }
    }
    for (auto& w : workers) w.join();
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }
  return out;
}

auto estimate_likelihood(const Rate_table& rates, const Typed_data& data,
                         const Mutation_model& mutation, const Estimator_options& options)
    -> Likelihood_estimate {
  return summarise(particle_log_weights(rates, data, mutation, options), options.seed);
}

auto estimate_likelihood(const Lambda_measure& measure, const Time_series_data& data,
                         const Mutation_model& mutation, const Estimator_options& options)
    -> Likelihood_estimate {
  auto typed = prepare_data(data, mutation);
  auto rates = Rate_table::from_measure(measure, std::max(2, typed.total_size));
  return estimate_likelihood(rates, typed, mutation, options);
}

auto estimate_likelihood(const Moment_sequence& moments, const Time_series_data& data,
                         const Mutation_model& mutation, const Estimator_options& options)
    -> Likelihood_estimate {
  auto typed = prepare_data(data, mutation);
  if (typed.total_size > moments.n()) {
    throw Domain_error{"dataset larger than the moment sequence supports"};
  }
  if (!check_complete_monotonicity(moments).monotone) {
    throw Domain_error{"moment sequence is not completely monotonic"};
  }
  auto rates = Rate_table::from_moments(moments, std::max(2, typed.total_size));
  return estimate_likelihood(rates, typed, mutation, options);
}

auto moment_hash(const Moment_sequence& moments) -> std::uint64_t {
  auto h = std::uint64_t{0x51ed270b2f6e3a4dULL};
  for (auto v : moments.values()) {
    auto bits = std::uint64_t{};
    std::memcpy(&bits, &v, sizeof bits);
    h = mix_seed(h ^ bits);
  }
  return h;
}

auto surrogate_likelihood(const Rate_table& rates, const Moment_sequence& moments,
                          const Typed_data& data, const Mutation_model& mutation, int particles)
    -> Likelihood_estimate {
  auto options = Estimator_options{};
  options.particles = particles;
  options.seed = moment_hash(moments);
  return estimate_likelihood(rates, data, mutation, options);
}

auto surrogate_likelihood(const Moment_sequence& moments, const Time_series_data& data,
                          const Mutation_model& mutation, int particles) -> Likelihood_estimate {
  auto typed = prepare_data(data, mutation);
  if (typed.total_size > moments.n()) {
    throw Domain_error{"dataset larger than the moment sequence supports"};
  }
  auto rates = Rate_table::from_moments(moments, std::max(2, typed.total_size));
  return surrogate_likelihood(rates, moments, typed, mutation, particles);
}

auto tune_particles(const Rate_table& rates, const Typed_data& data, const Mutation_model& mutation,
                    double target_variance, std::uint64_t seed, int repeats, int max_particles,
                    Estimator_kind kind, int threads) -> Tuning_result {
  if (!(target_variance > 0.0)) throw Domain_error{"target variance must be positive"};
  if (repeats < 2) throw Domain_error{"tuning needs at least 2 repeats"};
  for (int particles = 1; particles <= max_particles; particles *= 2) {
    auto logs = std::vector<double>{};
    auto finite = true;
    for (int r = 0; r < repeats && finite; ++r) {
      auto options = Estimator_options{particles, child_seed(seed, r), kind, threads};
      auto est = estimate_likelihood(rates, data, mutation, options);
      finite = !est.zero;
      logs.push_back(est.log_value);
    }
    if (!finite) continue;
    auto mean = 0.0;
    for (auto l : logs) mean += l;
    mean /= repeats;
    auto var = 0.0;
    for (auto l : logs) var += (l - mean) * (l - mean);
    var /= repeats - 1;
    if (var <= target_variance) return {particles, var};
  }
  throw Capacity_error{"log-likelihood variance target not reached within " +
                       std::to_string(max_particles) + " particles"};
}

}  // namespace lambda_infer
