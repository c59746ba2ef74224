#include "cli.h"

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "chain_csv.h"
#include "lambda_infer/bounds.h"
#include "lambda_infer/dataset_io.h"
#include "lambda_infer/errors.h"
#include "lambda_infer/genealogy.h"
#include "lambda_infer/likelihood.h"
#include "lambda_infer/mcmc.h"
#include "lambda_infer/measure.h"
#include "lambda_infer/moment_space.h"
#include "lambda_infer/mutation.h"
#include "lambda_infer/prior.h"
#include "lambda_infer/stationary.h"

namespace lambda_infer::cli {

namespace {

constexpr auto k_version = LAMBDA_INFER_VERSION;
constexpr auto k_default_schedule = "0:20,0.5:20,1:20,1.5:20,2:20";

struct Model_options {
  std::string model = "binary-loci";
  int loci = 10;
  double theta = 0.1;
  int types = 2;
  std::string matrix;
};

struct Prior_options {
  double eta = k_default_eta;
  int truncation = 4;
  double alpha0 = 0.1;
  std::string sigma_prior = "1,3";
};

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
  int threads = 0;
};

auto add_common(CLI::App* app, Common& c, bool seeded) -> void {
  if (seeded) app->add_option("--seed", c.seed, "Master seed");
  app->add_option("--out,-o", c.out, "Output file (default stdout)");
  app->add_option("--config", c.config, "Flat key = value file; flags override its values");
}

auto add_model(CLI::App* app, Model_options& m) -> void {
  app->add_option("--model", m.model, "binary-loci | pim | matrix")
      ->check(CLI::IsMember({"binary-loci", "pim", "matrix"}));
  app->add_option("--loci", m.loci, "Number of binary loci");
  app->add_option("--theta", m.theta, "Total mutation rate per lineage");
  app->add_option("--types", m.types, "Number of types for the parent-independent model");
  app->add_option("--matrix", m.matrix, "Whitespace-separated transition matrix file");
}

auto add_prior(CLI::App* app, Prior_options& p) -> void {
  app->add_option("--eta", p.eta, "Lower end of the kernel support");
  app->add_option("--truncation", p.truncation, "Number of stick-breaking kernels");
  app->add_option("--alpha0", p.alpha0, "Dirichlet-process concentration");
  app->add_option("--sigma-prior", p.sigma_prior, "Beta(a, b) prior of kernel sds, as a,b");
}

auto add_threads(CLI::App* app, Common& c) -> void {
  app->add_option("--threads", c.threads, "Worker threads (fallback LAMBDA_INFER_THREADS)");
}

auto resolve_threads(int flag) -> int {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("LAMBDA_INFER_THREADS")) {
    try {
      auto v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    throw Data_error{std::string{"LAMBDA_INFER_THREADS='"} + env + "' is not a positive integer"};
  }
  return 1;
}

auto read_matrix(const std::string& path) -> Eigen::MatrixXd {
  auto in = std::ifstream{path};
  if (!in) throw Data_error{"cannot open '" + path + "'"};
  auto rows = std::vector<std::vector<double>>{};
  auto line = std::string{};
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    auto fields = std::istringstream{line};
    auto row = std::vector<double>{};
    auto x = 0.0;
    while (fields >> x) row.push_back(x);
    if (!fields.eof()) throw Data_error{"matrix row " + std::to_string(rows.size() + 1) + " is malformed"};
    rows.push_back(std::move(row));
  }
  auto d = static_cast<int>(rows.size());
  auto m = Eigen::MatrixXd(d, d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[i].size()) != d) throw Data_error{"transition matrix is not square"};
    for (int j = 0; j < d; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

auto build_model(const Model_options& m) -> Mutation_model {
  if (m.model == "binary-loci") return Mutation_model::binary_loci(m.theta, m.loci);
  if (m.model == "pim") {
    if (m.types < 2) throw Domain_error{"--types must be >= 2"};
    return Mutation_model::parent_independent(m.theta, std::vector<double>(m.types, 1.0 / m.types));
  }
  if (m.matrix.empty()) throw Data_error{"--model matrix needs --matrix"};
  return Mutation_model::dense(m.theta, read_matrix(m.matrix));
}

auto build_prior(const Prior_options& p) -> Prior_spec {
  auto spec = Prior_spec{};
  spec.eta = p.eta;
  spec.truncation = p.truncation;
  spec.alpha0 = p.alpha0;
  auto ab = parse_tuples("(" + p.sigma_prior + ")", 2);
  if (ab.size() != 1) throw Data_error{"--sigma-prior expects a,b"};
  spec.sigma_a = ab[0][0];
  spec.sigma_b = ab[0][1];
  spec.validate();
  return spec;
}

auto parse_int_list(const std::string& text) -> std::vector<int> {
  auto out = std::vector<int>{};
  auto in = std::istringstream{text};
  auto item = std::string{};
  while (std::getline(in, item, ',')) {
    try {
      auto used = std::size_t{0};
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw Data_error{""};
    } catch (const std::exception&) {
      throw Data_error{"cannot parse integer list '" + text + "'"};
    }
  }
  return out;
}

auto parse_double_list(const std::string& text) -> std::vector<double> {
  auto out = std::vector<double>{};
  auto in = std::istringstream{text};
  auto item = std::string{};
  while (std::getline(in, item, ',')) {
    try {
      auto used = std::size_t{0};
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw Data_error{""};
    } catch (const std::exception&) {
      throw Data_error{"cannot parse number list '" + text + "'"};
    }
  }
  return out;
}

// "3<=0.5", "lambda4>=0.3"
auto parse_constraint(const std::string& text) -> Moment_constraint {
  auto le = text.find("<=");
  auto ge = text.find(">=");
  auto op = le != std::string::npos ? le : ge;
  if (op == std::string::npos) throw Data_error{"constraint '" + text + "' needs <= or >="};
  auto lhs = text.substr(0, op);
  if (lhs.rfind("lambda", 0) == 0) lhs = lhs.substr(6);
  try {
    auto used = std::size_t{0};
    auto index = std::stoi(lhs, &used);
    if (used != lhs.size()) throw Data_error{""};
    auto rhs = text.substr(op + 2);
    auto bound = std::stod(rhs, &used);
    if (used != rhs.size()) throw Data_error{""};
    if (le != std::string::npos) return {index, 0, bound};
    return {index, 1, -bound};
  } catch (const std::exception&) {
    throw Data_error{"cannot parse constraint '" + text + "'"};
  }
}

auto provenance(std::uint64_t seed, const std::vector<std::string>& args) -> std::string {
  auto s = std::string{"lambda-infer "} + k_version + " seed=" + std::to_string(seed) + " argv=lambda-infer";
  for (const auto& a : args) s += " " + a;
  return s;
}

auto with_output(const std::string& path, std::ostream& fallback,
                 const std::function<void(std::ostream&)>& write) -> void {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  auto file = std::ofstream{path};
  if (!file) throw Data_error{"cannot write '" + path + "'"};
  write(file);
  if (!file) throw Data_error{"write to '" + path + "' failed"};
}

auto exact_counts(const Typed_data& typed, const Mutation_model& mutation) -> std::vector<int> {
  if (typed.batches.size() != 1) throw Data_error{"--exact needs single-time data"};
  auto counts = std::vector<int>(mutation.num_types(), 0);
  for (const auto& [type, count] : typed.batches.front().counts) counts[type] = count;
  return counts;
}

// Appends `--key value` for config keys not already given on the command line.
auto apply_config(CLI::App& app, std::vector<std::string> args) -> std::vector<std::string> {
  auto path = std::string{};
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.empty()) return args;
  auto* sub = app.get_subcommand_no_throw(args[0]);
  if (sub == nullptr) return args;
  auto given = [&](const std::string& flag) {
    for (const auto& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  auto extra = std::vector<std::string>{};
  for (const auto& [raw_key, value] : read_key_values(path)) {
    auto key = raw_key;
    for (auto& ch : key) {
      if (ch == '_') ch = '-';
    }
    if (key == "config") continue;
    auto flag = "--" + key;
    auto* opt = sub->get_option_no_throw(flag);
    if (opt == nullptr) throw Data_error{"config key '" + key + "' is not an option of " + args[0]};
    if (given(flag)) continue;
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1" || value == "yes") extra.push_back(flag);
      continue;
    }
    extra.push_back(flag);
    extra.push_back(value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

auto run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int {
  auto app = CLI::App{"Bayesian nonparametric inference of Lambda-coalescent measures",
                      "lambda-infer"};
  app.require_subcommand(1);

  // simulate
  auto sim = Common{};
  auto sim_model = Model_options{};
  auto sim_measure = std::string{};
  auto sim_schedule = std::string{k_default_schedule};
  auto* simulate = app.add_subcommand("simulate", "Simulate a serially sampled dataset");
  add_common(simulate, sim, true);
  add_model(simulate, sim_model);
  simulate->add_option("--measure", sim_measure, "Named measure or measure file")->required();
  simulate->add_option("--schedule", sim_schedule, "Sampling times and sizes, time:size,...");

  // likelihood
  auto lik = Common{};
  auto lik_model = Model_options{};
  auto lik_data = std::string{};
  auto lik_measure = std::string{};
  auto lik_moments = std::string{};
  auto lik_particles = 100;
  auto lik_estimator = std::string{"is"};
  auto lik_exact = false;
  auto* likelihood = app.add_subcommand("likelihood", "Estimate the likelihood of a dataset");
  add_common(likelihood, lik, true);
  add_model(likelihood, lik_model);
  add_threads(likelihood, lik);
  likelihood->add_option("--data", lik_data, "Dataset file")->required();
  auto* lm = likelihood->add_option("--measure", lik_measure, "Named measure or measure file");
  likelihood->add_option("--moments", lik_moments, "Moment CSV (lambda_k column)")->excludes(lm);
  likelihood->add_option("--particles", lik_particles, "Particles");
  likelihood->add_option("--estimator", lik_estimator, "is | peeling")
      ->check(CLI::IsMember({"is", "peeling"}));
  likelihood->add_flag("--exact", lik_exact, "Exact likelihood (single-time data)");

  // mcmc
  auto mc = Common{};
  auto mc_model = Model_options{};
  auto mc_prior = Prior_options{};
  auto mc_data = std::string{};
  auto mc_variant = std::string{"exact"};
  auto mc_steps = 1000;
  auto mc_particles = 20;
  auto mc_surrogate = k_surrogate_particles;
  auto mc_scale = 0.0025;
  auto mc_thinning = 1;
  auto mc_walk = std::string{"cdf"};
  auto mc_estimator = std::string{"is"};
  auto mc_exact = false;
  auto mc_no_timing = false;
  auto* mcmc = app.add_subcommand("mcmc", "Run a pseudo-marginal chain");
  add_common(mcmc, mc, true);
  add_model(mcmc, mc_model);
  add_prior(mcmc, mc_prior);
  add_threads(mcmc, mc);
  mcmc->add_option("--data", mc_data, "Dataset file")->required();
  mcmc->add_option("--variant", mc_variant, "exact | noisy | da-exact | da-noisy");
  mcmc->add_option("--steps", mc_steps, "Chain steps");
  mcmc->add_option("--particles", mc_particles, "Particles per likelihood estimate");
  mcmc->add_option("--surrogate-particles", mc_surrogate, "Particles of the stage-one surrogate");
  mcmc->add_option("--scale", mc_scale, "Proposal variance per coordinate");
  mcmc->add_option("--thinning", mc_thinning, "Keep every k-th step");
  mcmc->add_option("--stick-walk", mc_walk, "cdf | raw")->check(CLI::IsMember({"cdf", "raw"}));
  mcmc->add_option("--estimator", mc_estimator, "is | peeling")
      ->check(CLI::IsMember({"is", "peeling"}));
  mcmc->add_flag("--exact-likelihood", mc_exact, "Use the exact likelihood (single-time data)");
  mcmc->add_flag("--no-timing", mc_no_timing, "Write wall_ms as 0 so output is byte-reproducible");

  // bounds
  auto bd = Common{};
  auto bd_chain = std::string{};
  auto bd_level = 0.95;
  auto bd_indices = std::string{"3"};
  auto bd_functional = std::string{"exp"};
  auto bd_grid = 1000;
  auto bd_burn_in = 0L;
  auto bd_constraints = std::vector<std::string>{};
  auto* bounds = app.add_subcommand("bounds", "Bound a functional of Lambda over a moment box");
  add_common(bounds, bd, false);
  bounds->add_option("--chain", bd_chain, "Chain CSV");
  bounds->add_option("--level", bd_level, "Credible level of the marginal boxes");
  bounds->add_option("--indices", bd_indices, "Moment indices k, as 3,4,...");
  bounds->add_option("--functional", bd_functional, "exp | indicator:a,b | monomial:j");
  bounds->add_option("--grid", bd_grid, "Grid size of the linear program");
  bounds->add_option("--burn-in", bd_burn_in, "Drop chain rows with step below this");
  bounds->add_option("--constraint", bd_constraints, "Extra constraint such as 3<=0.5 or 4>=0.3");

  // moments
  auto mo = Common{};
  auto mo_measure = std::string{};
  auto mo_n = 10;
  auto* moments = app.add_subcommand("moments", "Moments lambda_3..lambda_n of a measure");
  add_common(moments, mo, false);
  moments->add_option("--measure", mo_measure, "Named measure or measure file")->required();
  moments->add_option("--n", mo_n, "Largest index");

  // table1
  auto t1 = Common{};
  auto t1_thetas = std::string{"0.04,0.1,0.5,1,5,10,17"};
  auto* table1 = app.add_subcommand("table1", "Expected limiting posterior probabilities");
  add_common(table1, t1, false);
  table1->add_option("--theta-list", t1_thetas, "Comma-separated mutation rates");

  // prior
  auto pr = Common{};
  auto pr_prior = Prior_options{};
  auto pr_samples = 10000;
  auto pr_n = 20;
  auto* prior = app.add_subcommand("prior", "Independent prior draws of lambda_3..lambda_n");
  add_common(prior, pr, true);
  add_prior(prior, pr_prior);
  prior->add_option("--samples", pr_samples, "Number of draws");
  prior->add_option("--n", pr_n, "Largest moment index");

  auto* version = app.add_subcommand("version", "Print the version");

  try {
    auto full = apply_config(app, args);
    auto argv = std::vector<const char*>{"lambda-infer"};
    for (const auto& a : full) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
    out << (sub ? sub->help() : app.help());
    return Exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
    err << (sub ? sub->help() : app.help());
    return Exit_code::usage;
  } catch (const Data_error& e) {
    err << "error: " << e.what() << "\n";
    return Exit_code::data;
  }

  try {
    if (*version) {
      out << "lambda-infer " << k_version << "\n";
    } else if (*simulate) {
      auto mutation = build_model(sim_model);
      auto measure = parse_measure_spec(sim_measure);
      auto schedule = Sampling_schedule::parse(sim_schedule);
      auto data = simulate_dataset(measure, mutation, schedule, sim.seed);
      with_output(sim.out, out, [&](std::ostream& o) {
        o << "# " << provenance(sim.seed, args) << "\n";
        write_dataset(o, data);
      });
    } else if (*likelihood) {
      auto mutation = build_model(lik_model);
      auto data = read_dataset(lik_data);
      auto options = Estimator_options{};
      options.particles = lik_particles;
      options.seed = lik.seed;
      options.kind = lik_estimator == "is" ? Estimator_kind::importance_sampling
                                           : Estimator_kind::tree_peeling;
      options.threads = resolve_threads(lik.threads);
      if (lik_measure.empty() && lik_moments.empty()) {
        throw Data_error{"likelihood needs --measure or --moments"};
      }
      auto result = Likelihood_estimate{};
      if (lik_exact) {
        auto counts = exact_counts(prepare_data(data, mutation), mutation);
        auto value = 0.0;
        if (!lik_measure.empty()) {
          value = exact_likelihood(parse_measure_spec(lik_measure), counts, mutation);
        } else {
          auto in = std::ifstream{lik_moments};
          if (!in) throw Data_error{"cannot open '" + lik_moments + "'"};
          value = exact_likelihood(parse_moments_csv(in), counts, mutation);
        }
        result.value = value;
        result.log_value = std::log(value);
        result.seed = lik.seed;
      } else if (!lik_measure.empty()) {
        result = estimate_likelihood(parse_measure_spec(lik_measure), data, mutation, options);
      } else {
        auto in = std::ifstream{lik_moments};
        if (!in) throw Data_error{"cannot open '" + lik_moments + "'"};
        result = estimate_likelihood(parse_moments_csv(in), data, mutation, options);
      }
      with_output(lik.out, out, [&](std::ostream& o) {
        o << "# " << provenance(lik.seed, args) << "\n";
        o << "log_likelihood,likelihood,log_variance,standard_error,particles,estimator\n";
        o << std::setprecision(12) << result.log_value << ',' << result.value << ','
          << result.log_variance << ',' << result.standard_error << ','
          << (lik_exact ? 0 : result.particles) << ','
          << (lik_exact ? "exact" : lik_estimator) << "\n";
      });
    } else if (*mcmc) {
      auto mutation = build_model(mc_model);
      auto data = read_dataset(mc_data);
      auto config = Chain_config{};
      config.variant = parse_variant(mc_variant);
      config.steps = mc_steps;
      config.scale = mc_scale;
      config.seed = mc.seed;
      config.thinning = mc_thinning;
      config.prior = build_prior(mc_prior);
      config.stick_walk = mc_walk == "cdf" ? Stick_walk::prior_cdf : Stick_walk::raw;
      if (mc_particles < 1) throw Domain_error{"--particles must be >= 1"};
      auto options = Estimator_options{};
      options.particles = mc_particles;
      options.kind = mc_estimator == "is" ? Estimator_kind::importance_sampling
                                          : Estimator_kind::tree_peeling;
      options.threads = resolve_threads(mc.threads);
      auto target = Data_target{config.prior, prepare_data(data, mutation), mutation, options,
                                mc_surrogate, mc_exact};
      auto chain = run_chain(config, target);
      auto summary = std::ostringstream{};
      summary << std::setprecision(6) << "variant=" << mc_variant << " steps=" << mc_steps
              << " particles=" << mc_particles << " thinning=" << mc_thinning
              << " proposals=" << chain.counters.proposals
              << " stage1_rate=" << chain.stage1_rate() << " stage2_rate=" << chain.stage2_rate()
              << " overall_rate=" << chain.overall_rate()
              << " initial_draws=" << chain.initial_draws << " wall_ms="
              << (mc_no_timing ? 0.0 : std::round(chain.wall_ms));
      with_output(mc.out, out, [&](std::ostream& o) {
        write_chain_csv(o, config.prior, chain, {provenance(mc.seed, args), summary.str()},
                        !mc_no_timing);
      });
      if (!mc.out.empty()) err << summary.str() << "\n";
    } else if (*bounds) {
      auto q = parse_functional(bd_functional);
      auto constraints = std::vector<Moment_constraint>{};
      auto notes = std::vector<std::string>{};
      if (!bd_chain.empty()) {
        auto columns = read_csv_columns(bd_chain);
        auto indices = parse_int_list(bd_indices);
        auto max_index = 3;
        for (auto k : indices) {
          if (k < 3) throw Domain_error{"moment indices must be >= 3"};
          max_index = std::max(max_index, k);
        }
        const auto& steps = columns["step"];
        auto traces = std::vector<std::vector<double>>{};
        for (int k = 3; k <= max_index; ++k) {
          auto it = columns.find("lambda" + std::to_string(k));
          if (it == columns.end()) {
            throw Data_error{"chain has no column lambda" + std::to_string(k)};
          }
          auto trace = std::vector<double>{};
          for (std::size_t i = 0; i < it->second.size(); ++i) {
            if (steps.empty() || steps[i] >= static_cast<double>(bd_burn_in)) {
              trace.push_back(it->second[i]);
            }
          }
          traces.push_back(std::move(trace));
        }
        if (traces.front().empty()) throw Data_error{"no chain rows after burn-in"};
        constraints = constraints_from_samples(traces, bd_level, indices);
        auto [lo, hi] = credible_interval(traces.front(), bd_level);
        auto ks = std::ostringstream{};
        ks << std::setprecision(6) << "kingman_test level=" << bd_level
           << " lambda3_interval=[" << lo << "," << hi << "] result="
           << (kingman_test(traces.front(), bd_level) ? "true" : "false");
        notes.push_back(ks.str());
      }
      for (const auto& c : bd_constraints) constraints.push_back(parse_constraint(c));
      if (constraints.empty()) throw Data_error{"bounds needs --chain or --constraint"};
      auto c_text = std::ostringstream{};
      c_text << std::setprecision(8) << "constraints:";
      for (const auto& c : constraints) {
        c_text << " lambda" << c.index << (c.sign == 0 ? "<=" : ">=")
               << (c.sign == 0 ? c.bound : -c.bound);
      }
      notes.push_back(c_text.str());
      auto low = std::async(std::launch::async, [&] {
        return extremize(q, constraints, Extremum_mode::min, bd_grid);
      });
      auto high = extremize(q, constraints, Extremum_mode::max, bd_grid);
      auto min = low.get();
      with_output(bd.out, out, [&](std::ostream& o) {
        o << "# " << provenance(bd.seed, args) << "\n";
        for (const auto& n : notes) o << "# " << n << "\n";
        o << "extremum,value,atom,location,weight\n" << std::setprecision(12);
        auto rows = [&](const char* name, const Extremum& e) {
          for (std::size_t i = 0; i < e.witness.atoms.size(); ++i) {
            o << name << ',' << e.value << ',' << i << ',' << e.witness.atoms[i].x << ','
              << e.witness.atoms[i].w << "\n";
          }
        };
        rows("min", min);
        rows("max", high);
      });
    } else if (*moments) {
      if (mo_n < 3) throw Domain_error{"--n must be >= 3"};
      auto measure = parse_measure_spec(mo_measure);
      with_output(mo.out, out, [&](std::ostream& o) {
        o << "# " << provenance(mo.seed, args) << "\n";
        write_moments_csv(o, Moment_sequence::from_measure(measure, mo_n));
      });
    } else if (*table1) {
      auto thetas = parse_double_list(t1_thetas);
      auto rows = std::vector<std::array<double, 3>>{};
      for (auto theta : thetas) {
        rows.push_back({theta, expected_limiting_posterior(theta, Two_allele_model::kingman),
                        expected_limiting_posterior(theta, Two_allele_model::star)});
      }
      with_output(t1.out, out, [&](std::ostream& o) {
        o << "# " << provenance(t1.seed, args) << "\n";
        o << "theta,E_kingman,E_star\n" << std::setprecision(10);
        for (const auto& r : rows) o << r[0] << ',' << r[1] << ',' << r[2] << "\n";
      });
    } else if (*prior) {
      auto spec = build_prior(pr_prior);
      if (pr_samples < 1) throw Domain_error{"--samples must be >= 1"};
      if (pr_n < 3) throw Domain_error{"--n must be >= 3"};
      auto rng = make_rng(pr.seed);
      with_output(pr.out, out, [&](std::ostream& o) {
        o << "# " << provenance(pr.seed, args) << "\n";
        o << "sample";
        for (int k = 3; k <= pr_n; ++k) o << ",lambda" << k;
        o << "\n" << std::setprecision(12);
        for (int s = 0; s < pr_samples; ++s) {
          auto m = params_to_moments(spec, sample_prior(spec, rng), pr_n);
          o << s;
          for (auto x : m.values()) o << ',' << x;
          o << "\n";
        }
      });
    }
  } catch (const Data_error& e) {
    err << "data error: " << e.what() << "\n";
    return Exit_code::data;
  } catch (const Domain_error& e) {
    err << "config error: " << e.what() << "\n";
    return Exit_code::data;
  } catch (const Infeasible_error& e) {
    err << "infeasible: " << e.what() << "\n";
    return Exit_code::numerical;
  } catch (const Numerical_error& e) {
    err << "numerical error: " << e.what() << " (achieved error " << e.achieved_error() << ")\n";
    return Exit_code::numerical;
  } catch (const Capacity_error& e) {
    err << "capacity error: " << e.what() << "\n";
    return Exit_code::numerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return Exit_code::numerical;
  }
  return Exit_code::ok;
}

}  // namespace lambda_infer::cli
