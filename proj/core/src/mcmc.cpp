#include "lambda_infer/mcmc.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "lambda_infer/errors.h"

namespace lambda_infer {

namespace {

constexpr double k_neg_inf = -std::numeric_limits<double>::infinity();
constexpr int k_max_initial_draws = 10'000;

// log P(lo <= N(mu, sd^2) <= hi)
auto log_normal_mass(double mu, double sd, double lo, double hi) -> double {
  constexpr auto r = std::numbers::sqrt2;
  auto l = (lo - mu) / sd;
  auto u = (hi - mu) / sd;
  double p;
  if (l >= 0.0) {
    p = 0.5 * (std::erfc(l / r) - std::erfc(u / r));
  } else if (u <= 0.0) {
    p = 0.5 * (std::erfc(-u / r) - std::erfc(-l / r));
  } else {
    p = 1.0 - 0.5 * (std::erfc(-l / r) + std::erfc(u / r));
  }
  return std::log(p);
}

constexpr double k_below_one = 1.0 - 0x1.0p-53;

// log du/dv
auto log_stick_jacobian(const Prior_spec& spec, double v) -> double {
  return std::log(spec.alpha0) + (spec.alpha0 - 1.0) * std::log1p(-v);
}

auto make_point(const Chain_config& config, std::vector<double> coords, const Chain_target& target)
    -> Chain_point {
  auto point = Chain_point{};
  point.params = from_walk_coordinates(config.prior, coords, config.stick_walk);
  point.coords = std::move(coords);
  point.log_prior = log_walk_prior(config.prior, point.coords, config.stick_walk);
  if (std::isfinite(point.log_prior)) target.evaluate(point);
  return point;
}

auto accept(double log_a, Rng& rng) -> bool {
  if (std::isnan(log_a)) return false;
  return log_a >= 0.0 || std::log(uniform_open(rng)) < log_a;
}

}  // namespace

auto parse_variant(const std::string& name) -> Chain_variant {
  if (name == "exact") return Chain_variant::exact;
  if (name == "noisy") return Chain_variant::noisy;
  if (name == "da-exact") return Chain_variant::da_exact;
  if (name == "da-noisy") return Chain_variant::da_noisy;
  throw Data_error{"unknown chain variant '" + name + "' (exact, noisy, da-exact, da-noisy)"};
}

auto variant_name(Chain_variant variant) -> std::string {
  switch (variant) {
    case Chain_variant::exact: return "exact";
    case Chain_variant::noisy: return "noisy";
    case Chain_variant::da_exact: return "da-exact";
    case Chain_variant::da_noisy: return "da-noisy";
  }
  return "exact";
}

auto Chain_config::validate() const -> void {
  if (steps < 1) throw Domain_error{"steps must be >= 1"};
  if (!(scale > 0.0)) throw Domain_error{"proposal scale must be positive"};
  if (thinning < 1) throw Domain_error{"thinning must be >= 1"};
  prior.validate();
}

Data_target::Data_target(Prior_spec prior, Typed_data data, Mutation_model mutation,
                         Estimator_options estimator, int surrogate_particles, bool exact)
    : prior_{prior},
      data_{std::move(data)},
      mutation_{std::move(mutation)},
      estimator_{estimator},
      surrogate_particles_{surrogate_particles},
      exact_{exact} {
  if (exact_) {
    if (data_.batches.size() != 1) throw Data_error{"exact likelihood needs single-time data"};
    exact_counts_.assign(mutation_.num_types(), 0);
    for (const auto& [type, count] : data_.batches.front().counts) exact_counts_[type] = count;
  }
}

auto Data_target::moment_count() const -> int { return std::max(3, data_.total_size); }

auto Data_target::evaluate(Chain_point& point) const -> void {
  auto rates = std::make_shared<Rate_table>(
      Rate_table::from_measure(params_to_measure(prior_, point.params), moment_count()));
  point.moments.clear();
  // lambda_k = lambda_{k,k}
  for (int k = 3; k <= moment_count(); ++k) point.moments.push_back(rates->lambda(k, k));
  point.rates = std::move(rates);
}

auto Data_target::log_estimate(const Chain_point& point, std::uint64_t seed) const -> double {
  if (exact_) {
    auto value = exact_likelihood(*point.rates, exact_counts_, mutation_);
    return value > 0.0 ? std::log(value) : k_neg_inf;
  }
  auto options = estimator_;
  options.seed = seed;
  return estimate_likelihood(*point.rates, data_, mutation_, options).log_value;
}

auto Data_target::log_surrogate(const Chain_point& point) const -> double {
  return surrogate_likelihood(*point.rates, Moment_sequence{point.moments}, data_, mutation_,
                              surrogate_particles_)
      .log_value;
}

// u = 1 - (1 - v)^alpha0 is flat where the Beta(1, alpha0) stick density piles
// up against v = 1.
auto to_walk_coordinates(const Prior_spec& spec, const Prior_params& params, Stick_walk walk)
    -> std::vector<double> {
  auto x = params.to_vector();
  if (walk == Stick_walk::raw) return x;
  for (std::size_t i = x.size() - params.sticks.size(); i < x.size(); ++i) {
    x[i] = -std::expm1(spec.alpha0 * std::log1p(-x[i]));
  }
  return x;
}

auto from_walk_coordinates(const Prior_spec& spec, const std::vector<double>& coords,
                           Stick_walk walk) -> Prior_params {
  auto x = coords;
  if (walk == Stick_walk::prior_cdf) {
    auto sticks = static_cast<std::size_t>(spec.truncation - 1);
    for (std::size_t i = x.size() - sticks; i < x.size(); ++i) {
      x[i] = std::min(-std::expm1(std::log1p(-x[i]) / spec.alpha0), k_below_one);
    }
  }
  return Prior_params::from_vector(x, spec.truncation);
}

auto log_walk_prior(const Prior_spec& spec, const std::vector<double>& coords, Stick_walk walk)
    -> double {
  auto params = from_walk_coordinates(spec, coords, walk);
  if (walk == Stick_walk::raw) return log_prior_density(spec, params);
  auto sticks = params.sticks.size();
  for (std::size_t i = coords.size() - sticks; i < coords.size(); ++i) {
    if (!(coords[i] >= 0.0 && coords[i] <= 1.0)) return k_neg_inf;
  }
  // The stick factors are uniform in u; score them at an interior point.
  std::fill(params.sticks.begin(), params.sticks.end(), 0.5);
  auto total = log_prior_density(spec, params);
  return total - static_cast<double>(sticks) * log_stick_jacobian(spec, 0.5);
}

auto proposal_log_ratio(const Prior_spec& spec, const std::vector<double>& from,
                        const std::vector<double>& to, double scale) -> double {
  auto sd = std::sqrt(scale);
  auto lo = parameter_lower_bounds(spec);
  auto hi = parameter_upper_bounds(spec);
  // K(x, y) = phi((y - x) / sd) / (sd Z(x)); the Gaussian factors cancel.
  auto total = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    total += log_normal_mass(from[i], sd, lo[i], hi[i]) - log_normal_mass(to[i], sd, lo[i], hi[i]);
  }
  return total;
}

auto propose(const Prior_spec& spec, const std::vector<double>& coords, double scale, Rng& rng,
             Stick_walk walk) -> Proposal {
  auto sd = std::sqrt(scale);
  auto lo = parameter_lower_bounds(spec);
  auto hi = parameter_upper_bounds(spec);
  auto y = coords;
  auto normal = std::normal_distribution<double>{0.0, sd};
  for (std::size_t i = 0; i < coords.size(); ++i) {
    auto start = std::clamp(coords[i], lo[i], hi[i]);
    do {
      y[i] = start + normal(rng);
    } while (!(y[i] >= lo[i] && y[i] <= hi[i]));
  }
  auto ratio = proposal_log_ratio(spec, coords, y, scale);
  auto params = from_walk_coordinates(spec, y, walk);
  return {std::move(y), std::move(params), ratio};
}

auto pm_step(Chain_state& state, const Chain_target& target, const Chain_config& config, Rng& rng,
             Seed_stream& seeds) -> void {
  auto proposal = propose(config.prior, state.current.coords, config.scale, rng, config.stick_walk);
  ++state.counters.proposals;
  state.last_accepted = false;
  state.last_stage1_accepted = false;
  auto next = make_point(config, std::move(proposal.coords), target);
  if (!std::isfinite(next.log_prior)) return;
  state.last_stage1_accepted = true;
  ++state.counters.stage1_accepted;
  next.log_estimate = target.log_estimate(next, seeds.next());
  ++state.counters.full_evaluations;
  if (config.variant == Chain_variant::noisy) {
    state.current.log_estimate = target.log_estimate(state.current, seeds.next());
  }
  if (!std::isfinite(next.log_estimate)) return;
  auto log_a = proposal.log_ratio + next.log_prior - state.current.log_prior + next.log_estimate -
               state.current.log_estimate;
  if (accept(log_a, rng)) {
    state.current = std::move(next);
    state.last_accepted = true;
    ++state.counters.accepted;
  }
}

auto da_step(Chain_state& state, const Chain_target& target, const Chain_config& config, Rng& rng,
             Seed_stream& seeds) -> void {
  auto proposal = propose(config.prior, state.current.coords, config.scale, rng, config.stick_walk);
  ++state.counters.proposals;
  state.last_accepted = false;
  state.last_stage1_accepted = false;
  auto next = make_point(config, std::move(proposal.coords), target);
  if (!std::isfinite(next.log_prior)) return;
  next.log_surrogate = target.log_surrogate(next);
  if (!std::isfinite(next.log_surrogate)) return;
  auto log_a1 = proposal.log_ratio + next.log_prior - state.current.log_prior +
                next.log_surrogate - state.current.log_surrogate;
  if (!accept(log_a1, rng)) return;
  state.last_stage1_accepted = true;
  ++state.counters.stage1_accepted;
  next.log_estimate = target.log_estimate(next, seeds.next());
  ++state.counters.full_evaluations;
  if (config.variant == Chain_variant::da_noisy) {
    state.current.log_estimate = target.log_estimate(state.current, seeds.next());
  }
  if (!std::isfinite(next.log_estimate)) return;
  auto log_a2 = (next.log_estimate - state.current.log_estimate) -
                (next.log_surrogate - state.current.log_surrogate);
  if (accept(log_a2, rng)) {
    state.current = std::move(next);
    state.last_accepted = true;
    ++state.counters.accepted;
  }
}

auto Chain_output::stage1_rate() const -> double {
  return counters.proposals ? static_cast<double>(counters.stage1_accepted) / counters.proposals
                            : 0.0;
}

auto Chain_output::stage2_rate() const -> double {
  return counters.stage1_accepted
             ? static_cast<double>(counters.accepted) / counters.stage1_accepted
             : 0.0;
}

auto Chain_output::overall_rate() const -> double {
  return counters.proposals ? static_cast<double>(counters.accepted) / counters.proposals : 0.0;
}

auto run_chain(const Chain_config& config, const Chain_target& target) -> Chain_output {
  config.validate();
  auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  };
  auto rng = make_rng(config.seed, 0);
  auto seeds = Seed_stream{child_seed(config.seed, 1)};
  auto delayed = config.variant == Chain_variant::da_exact || config.variant == Chain_variant::da_noisy;

  auto out = Chain_output{};
  auto state = Chain_state{};
  while (true) {
    if (++out.initial_draws > k_max_initial_draws) {
      throw Numerical_error{"no prior draw with a positive likelihood estimate", 0.0};
    }
    auto draw = sample_prior(config.prior, rng);
    state.current =
        make_point(config, to_walk_coordinates(config.prior, draw, config.stick_walk), target);
    if (!std::isfinite(state.current.log_prior)) continue;
    state.current.log_estimate = target.log_estimate(state.current, seeds.next());
    if (!std::isfinite(state.current.log_estimate)) continue;
    if (delayed) {
      state.current.log_surrogate = target.log_surrogate(state.current);
      if (!std::isfinite(state.current.log_surrogate)) continue;
    }
    break;
  }

  auto record = [&](long step) {
    out.records.push_back({step, state.current.params.to_vector(), state.current.moments,
                           state.current.log_estimate, state.last_accepted,
                           state.last_stage1_accepted, elapsed_ms()});
  };
  record(0);
  for (long step = 1; step <= config.steps; ++step) {
    if (delayed) {
      da_step(state, target, config, rng, seeds);
    } else {
      pm_step(state, target, config, rng, seeds);
    }
    if (step % config.thinning == 0) record(step);
  }
  out.counters = state.counters;
  out.wall_ms = elapsed_ms();
  return out;
}

auto quantile(std::vector<double> values, double prob) -> double {
  if (values.empty()) throw Domain_error{"quantile of an empty sample"};
  if (!(prob >= 0.0 && prob <= 1.0)) throw Domain_error{"quantile probability outside [0, 1]"};
  std::sort(values.begin(), values.end());
  auto h = (values.size() - 1) * prob;
  auto lo = static_cast<std::size_t>(std::floor(h));
  auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - lo) * (values[hi] - values[lo]);
}

auto credible_interval(const std::vector<double>& trace, double level)
    -> std::pair<double, double> {
  if (!(level > 0.0 && level < 1.0)) throw Domain_error{"level must lie in (0, 1)"};
  if (trace.empty()) throw Domain_error{"credible interval of an empty trace"};
  return {quantile(trace, 0.5 * (1.0 - level)), quantile(trace, 0.5 * (1.0 + level))};
}

}  // namespace lambda_infer
