// Runs every primary acceptance criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion.  Exit status 0 iff all pass.
//   acceptance [--only name[,name...]]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lambda_infer/bounds.h"
#include "lambda_infer/dataset_io.h"
#include "lambda_infer/likelihood.h"
#include "lambda_infer/mcmc.h"
#include "lambda_infer/measure.h"
#include "lambda_infer/moment_space.h"
#include "lambda_infer/mutation.h"
#include "lambda_infer/prior.h"
#include "lambda_infer/rates.h"
#include "lambda_infer/stationary.h"

using namespace lambda_infer;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

auto fmt(double x, int precision = 4) -> std::string {
  auto s = std::ostringstream{};
  s.precision(precision);
  s << x;
  return s.str();
}

auto oracle_mutation() -> Mutation_model {
  auto m = Eigen::MatrixXd(2, 2);
  m << 0.3, 0.7, 0.6, 0.4;
  return Mutation_model::dense(0.5, m);
}

auto table1() -> Outcome {
  struct Row {
    double theta, kingman, star;
  };
  constexpr Row published[] = {{0.04, 0.84, 0.16}, {0.1, 0.73, 0.27}, {0.5, 0.54, 0.46}, {1, 0.50, 0.50},
                           {5, 0.65, 0.35},    {10, 0.75, 0.25},  {17, 0.82, 0.18}};
  auto start = std::chrono::steady_clock::now();
  auto worst = 0.0;
  for (const auto& r : published) {
    worst = std::max(worst, std::abs(expected_limiting_posterior(r.theta, Two_allele_model::kingman) - r.kingman));
    worst = std::max(worst, std::abs(expected_limiting_posterior(r.theta, Two_allele_model::star) - r.star));
  }
  auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 0.01 && secs < 5.0,
          "14 values, max |diff| " + fmt(worst) + " (tol 0.01), " + fmt(secs, 3) + " s (limit 5)"};
}

auto table2() -> Outcome {
  auto alpha = 1.5;
  auto psi = 0.5;
  auto c = 0.3;
  auto worst = 0.0;
  for (int k = 3; k <= 12; ++k) {
    auto rising = 1.0;  // (2 - alpha)_{k-2} / (2)_{k-2}
    for (int j = 0; j < k - 2; ++j) rising *= (2 - alpha + j) / (2.0 + j);
    auto pairs = std::vector<std::pair<Lambda_measure, double>>{
        {Lambda_measure::kingman(), 0.0},
        {Lambda_measure::star(), 1.0},
        {Lambda_measure::beta_coalescent(alpha), rising},
        {Lambda_measure::uniform(), 1.0 / (k - 1)},
        {Lambda_measure::eldon_wakeley(psi), std::pow(psi, k) / (2 + psi * psi)},
        {Lambda_measure::durrett_schweinsberg(c), 2 * (1 - c) / k}};
    for (const auto& [m, expected] : pairs) worst = std::max(worst, std::abs(moment(m, k) - expected));
  }
  return {worst <= 1e-8, "6 measures x k = 3..12, max |diff| " + fmt(worst, 3) + " (tol 1e-8)"};
}

auto bound_example() -> Outcome {
  auto start = std::chrono::steady_clock::now();
  auto c = std::vector<Moment_constraint>{{3, 0, 0.5}, {4, 1, -0.3}};
  auto lo = extremize(exp_decay_functional(), c, Extremum_mode::min, 1000).value;
  auto hi = extremize(exp_decay_functional(), c, Extremum_mode::max, 1000).value;
  auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto pass = std::abs(lo - 0.620) <= 0.005 && std::abs(hi - 0.810) <= 0.005 && secs < 10.0;
  return {pass, "(min, max) = (" + fmt(lo, 6) + ", " + fmt(hi, 6) + ") vs (0.620, 0.810) +-0.005, " +
                    fmt(secs, 3) + " s (limit 10)"};
}

auto truncation() -> Outcome {
  auto spec = Prior_spec{};
  auto value = truncation_error_bound(spec, 100);
  auto expected = 400 * std::exp(-30.0);
  char a[32];
  char b[32];
  std::snprintf(a, sizeof a, "%.2e", value);
  std::snprintf(b, sizeof b, "%.2e", expected);
  return {std::string{a} == b, std::string{a} + " vs 400e^-30 = " + b};
}

auto unbiasedness() -> Outcome {
  auto start = std::chrono::steady_clock::now();
  auto mutation = oracle_mutation();
  auto measures = std::vector<Lambda_measure>{Lambda_measure::kingman(), Lambda_measure::star(),
                                              Lambda_measure::uniform()};
  auto worst_z = 0.0;
  auto worst_norm = 0.0;
  auto failures = 0;
  auto checks = 0;
  std::uint64_t seed = 1;
  for (const auto& m : measures) {
    for (int n = 1; n <= 4; ++n) {
      auto table = exact_likelihood_table(Rate_table::from_measure(m, std::max(n, 2)), n, mutation);
      auto total = 0.0;
      for (const auto& [counts, p] : table) total += p;
      worst_norm = std::max(worst_norm, std::abs(total - 1.0));
      for (const auto& [counts, exact] : table) {
        auto data = Time_series_data{};
        auto batch = Observation_batch{0.0, {}};
        for (int t = 0; t < 2; ++t) {
          if (counts[t] > 0) batch.counts[std::to_string(t)] = counts[t];
        }
        data.batches.push_back(batch);
        auto est = estimate_likelihood(m, data, mutation, {10000, seed++});
        auto diff = std::abs(est.value - exact);
        auto ok = diff <= 3 * est.standard_error + 1e-12 * exact;
        if (est.standard_error > 0) worst_z = std::max(worst_z, diff / est.standard_error);
        failures += !ok;
        ++checks;
      }
    }
  }
  auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto pass = failures == 0 && worst_norm <= 1e-10 && secs < 120.0;
  return {pass, std::to_string(checks - failures) + "/" + std::to_string(checks) +
                    " configurations within 3 SE (max z " + fmt(worst_z, 3) + "), normalisation error " +
                    fmt(worst_norm, 3) + " (tol 1e-10), " + fmt(secs, 3) + " s (limit 120)"};
}

auto beta_half_seq(int n) -> Moment_sequence {
  auto v = std::vector<double>{};
  auto m = 1.0;
  for (int j = 1; j <= n - 2; ++j) {
    m *= (0.5 + j - 1) / (2.0 + j - 1);
    v.push_back(m);
  }
  return Moment_sequence{v};
}

auto quadrature() -> Outcome {
  auto moment_err = 0.0;
  auto mass_err = 0.0;
  auto pair_mass_err = 0.0;
  auto tv_err = 0.0;
  auto overlaps = 0;
  auto invariance_err = 0.0;
  using Maker = std::function<Moment_sequence(int)>;
  auto makers = std::vector<Maker>{
      [](int n) { return Moment_sequence::from_measure(Lambda_measure::uniform(), n); }, beta_half_seq};
  for (const auto& make : makers) {
    for (int n = 5; n <= 13; ++n) {
      auto seq = make(n);
      auto rule = gauss_quadrature(seq);
      auto m = rule.order();
      mass_err = std::max(mass_err, std::abs(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0) - 1.0));
      for (int j = 0; j <= 2 * m - 1; ++j) {
        auto q = 0.0;
        for (int i = 0; i < m; ++i) q += rule.weights[i] * std::pow(rule.nodes[i], j);
        moment_err = std::max(moment_err, std::abs(q - seq.raw(j)));
      }
      if (m >= 2) {
        auto pair = interlaced_pair(seq);
        pair_mass_err = std::max({pair_mass_err, std::abs(pair.x.total_mass() - 1.0),
                                  std::abs(pair.y.total_mass() - 1.0)});
        tv_err = std::max(tv_err, std::abs(total_variation(pair.x, pair.y) - 2.0));
        for (const auto& a : pair.x_intervals) {
          for (const auto& b : pair.y_intervals) {
            overlaps += std::min(a.hi, b.hi) > std::max(a.lo, b.lo) && a.mass > 0 && b.mass > 0;
          }
        }
      }
      // A different measure in the same moment class: the next-order Gauss rule.
      if (n % 2 == 1 && n >= 5) {
        auto twin = canonical_representative(make(n + 2));
        auto twin_rule = gauss_quadrature(Moment_sequence::from_measure(twin, n));
        for (int i = 0; i < m; ++i) {
          invariance_err = std::max({invariance_err, std::abs(twin_rule.nodes[i] - rule.nodes[i]),
                                     std::abs(twin_rule.weights[i] - rule.weights[i])});
        }
      }
    }
  }
  auto pass = moment_err <= 1e-8 && mass_err <= 1e-10 && pair_mass_err <= 1e-10 && tv_err <= 1e-12 &&
              overlaps == 0 && invariance_err <= 1e-10;
  return {pass, "U(0,1), Beta(0.5,1.5), n = 5..13: moment err " + fmt(moment_err, 3) + " (1e-8), sum zeta err " +
                    fmt(mass_err, 3) + " (1e-10), pair mass err " + fmt(pair_mass_err, 3) + ", TV err " +
                    fmt(tv_err, 3) + ", overlaps " + std::to_string(overlaps) + ", class invariance " +
                    fmt(invariance_err, 3) + " (1e-10)"};
}

auto ks_statistic(std::vector<double> a, std::vector<double> b) -> double {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  auto i = std::size_t{0};
  auto j = std::size_t{0};
  auto d = 0.0;
  while (i < a.size() && j < b.size()) {
    auto x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

auto lambda3_trace(const Chain_output& out, std::size_t burn_records) -> std::vector<double> {
  auto trace = std::vector<double>{};
  for (std::size_t i = burn_records + 1; i < out.records.size(); ++i) {
    trace.push_back(out.records[i].moments[0]);
  }
  return trace;
}

auto exactness() -> Outcome {
  constexpr int samples = 5000;
  constexpr int thinning = 250;
  constexpr int burn = 20;  // thinned records
  auto start = std::chrono::steady_clock::now();
  auto mutation = oracle_mutation();
  auto text = std::istringstream{"0 2 0\n0 1 1\n"};
  auto data = prepare_data(parse_dataset(text), mutation);
  auto spec = Prior_spec{};
  auto exact_target = Data_target{spec, data, mutation, {1, 0}, k_surrogate_particles, true};
  auto pm_target = Data_target{spec, data, mutation, {10, 0}};
  auto run = [&](Chain_variant variant, const Chain_target& target, std::uint64_t seed) {
    auto config = Chain_config{};
    config.variant = variant;
    config.steps = thinning * (samples + burn);
    config.thinning = thinning;
    config.seed = seed;
    config.prior = spec;
    return lambda3_trace(run_chain(config, target), burn);
  };
  auto reference = run(Chain_variant::exact, exact_target, 101);
  auto pm = run(Chain_variant::exact, pm_target, 102);
  auto da = run(Chain_variant::da_exact, pm_target, 103);
  auto critical = 1.6276 * std::sqrt(2.0 / samples);
  auto d_pm = ks_statistic(reference, pm);
  auto d_da = ks_statistic(reference, da);
  auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto pass = reference.size() == samples && d_pm < critical && d_da < critical && secs < 600.0;
  return {pass, "KS exact-MH vs pseudo-marginal " + fmt(d_pm, 3) + ", vs da-exact " + fmt(d_da, 3) +
                    " (0.01 critical " + fmt(critical, 3) + ", " + std::to_string(samples) +
                    " samples thinned by " + std::to_string(thinning) + "), " + fmt(secs, 4) +
                    " s (limit 600)"};
}

auto direction() -> Outcome {
  constexpr int replicates = 10;
  constexpr int steps = 2000;
  constexpr int burn_in = 500;
  auto start = std::chrono::steady_clock::now();
  auto mutation = Mutation_model::binary_loci(0.1, 10);
  auto bs = prepare_data(read_dataset(std::string{LAMBDA_INFER_DATA_DIR} + "/bs.tsv"), mutation);
  auto kingman = prepare_data(read_dataset(std::string{LAMBDA_INFER_DATA_DIR} + "/kingman.tsv"), mutation);
  auto spec = Prior_spec{};
  auto run = [&](const Typed_data& data, std::uint64_t seed) {
    auto target = Data_target{spec, data, mutation, {20, 0}};
    auto config = Chain_config{};
    config.variant = Chain_variant::da_exact;
    config.steps = steps;
    config.seed = seed;
    config.prior = spec;
    return lambda3_trace(run_chain(config, target), burn_in);
  };
  auto ordered = 0;
  auto kingman_true = 0;
  auto bs_false = 0;
  auto means = std::ostringstream{};
  means.precision(3);
  for (int r = 1; r <= replicates; ++r) {
    auto tb = run(bs, 1000 + r);
    auto tk = run(kingman, 2000 + r);
    auto mb = std::accumulate(tb.begin(), tb.end(), 0.0) / tb.size();
    auto mk = std::accumulate(tk.begin(), tk.end(), 0.0) / tk.size();
    ordered += mb > mk;
    kingman_true += kingman_test(tk, 0.95);
    bs_false += !kingman_test(tb, 0.95);
    means << (r > 1 ? " " : "") << mb << "/" << mk << "@" << quantile(tk, 0.025);
  }
  auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto majority = replicates / 2 + 1;
  auto pass = ordered >= 9 && kingman_true >= majority && bs_false >= majority && secs < 3600.0;
  return {pass, "mean lambda3 BS > Kingman in " + std::to_string(ordered) + "/10 (need 9); kingman_test true on Kingman " +
                    std::to_string(kingman_true) + "/10, false on BS " + std::to_string(bs_false) +
                    "/10 (need majority); " + fmt(secs, 4) + " s (limit 3600); BS/Kingman means @ Kingman 2.5% quantile: " +
                    means.str()};
}

auto prior_sanity() -> Outcome {
  auto spec = Prior_spec{};
  auto rng = make_rng(77);
  auto monotone = 0;
  auto sticks = std::vector<double>{};
  auto sigmas = std::vector<double>{};
  constexpr int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    auto p = sample_prior(spec, rng);
    monotone += check_complete_monotonicity(params_to_moments(spec, p, 20)).monotone;
    sticks.insert(sticks.end(), p.sticks.begin(), p.sticks.end());
    sigmas.insert(sigmas.end(), p.sigmas.begin(), p.sigmas.end());
  }
  auto z = [](const std::vector<double>& x, double target) {
    auto mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    auto s = 0.0;
    for (auto v : x) s += (v - mean) * (v - mean);
    auto se = std::sqrt(s / (x.size() - 1) / x.size());
    return std::abs(mean - target) / se;
  };
  auto zv = z(sticks, 1 / 1.1);
  auto zs = z(sigmas, 0.25);
  auto pass = monotone == draws && zv <= 3 && zs <= 3;
  return {pass, std::to_string(monotone) + "/10000 completely monotone (n = 20); E[v] z = " + fmt(zv, 3) +
                    ", E[sigma] z = " + fmt(zs, 3) + " (limit 3)"};
}

}  // namespace

auto main(int argc, char** argv) -> int {
  auto only = std::set<std::string>{};
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string{argv[i]} == "--only") {
      auto in = std::istringstream{argv[i + 1]};
      for (std::string name; std::getline(in, name, ',');) only.insert(name);
    }
  }
  auto criteria = std::vector<std::pair<std::string, std::function<Outcome()>>>{
      {"table1", table1},
      {"table2", table2},
      {"bound-example", bound_example},
      {"truncation-bound", truncation},
      {"estimator-unbiasedness", unbiasedness},
      {"quadrature-cms", quadrature},
      {"pseudo-marginal-exactness", exactness},
      {"simulation-direction", direction},
      {"prior-sanity", prior_sanity},
  };
  auto failed = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string{"exception: "} + e.what()};
    }
    failed += !outcome.pass;
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << name << ": " << outcome.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
