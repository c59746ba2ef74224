#include "lambda_infer/genealogy.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lambda_infer/errors.h"

namespace lambda_infer {

Sampling_schedule::Sampling_schedule(std::vector<Sampling_batch> batches)
    : batches_{std::move(batches)} {
  if (batches_.empty()) throw Data_error{"sampling schedule is empty"};
  for (std::size_t b = 0; b < batches_.size(); ++b) {
    if (batches_[b].size < 1) throw Data_error{"sampling batch sizes must be >= 1"};
    if (!std::isfinite(batches_[b].time) || batches_[b].time < 0.0) {
      throw Data_error{"sampling times must be finite and >= 0"};
    }
    if (b > 0 && !(batches_[b].time > batches_[b - 1].time)) {
      throw Data_error{"sampling times must be strictly increasing"};
    }
  }
  if (batches_.front().time != 0.0) throw Data_error{"the first sampling time must be 0"};
}

auto Sampling_schedule::parse(const std::string& text) -> Sampling_schedule {
  auto batches = std::vector<Sampling_batch>{};
  auto in = std::istringstream{text};
  auto item = std::string{};
  while (std::getline(in, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw Data_error{"schedule entry '" + item + "' is not time:size"};
    try {
      auto used = std::size_t{0};
      auto time = std::stod(item.substr(0, colon), &used);
      if (used != colon) throw Data_error{""};
      auto size_text = item.substr(colon + 1);
      auto size = std::stoi(size_text, &used);
      if (used != size_text.size()) throw Data_error{""};
      batches.push_back({time, size});
    } catch (const std::exception&) {
      throw Data_error{"schedule entry '" + item + "' is not time:size"};
    }
  }
  return Sampling_schedule{std::move(batches)};
}

auto Sampling_schedule::total_size() const -> int {
  auto total = 0;
  for (const auto& b : batches_) total += b.size;
  return total;
}

auto simulate_coalescent_tree(const Rate_table& rates, const Sampling_schedule& schedule,
                              Rng& rng) -> Genealogy {
  if (rates.n_max() < schedule.total_size()) {
    throw Domain_error{"rate table smaller than the sample"};
  }
  auto g = Genealogy{};
  const auto& batches = schedule.batches();
  auto num_batches = batches.size();
  g.leaf_offset.assign(num_batches, 0);
  auto total = schedule.total_size();
  g.nodes.reserve(2 * total);
  auto offset = 0;
  for (std::size_t b = 0; b < num_batches; ++b) {
    g.leaf_offset[b] = offset;
    for (int i = 0; i < batches[b].size; ++i) {
      g.nodes.push_back({schedule.backward_time(b), -1, static_cast<int>(b), -1, {}});
    }
    offset += batches[b].size;
  }

  auto active = std::vector<int>{};
  auto insert_batch = [&](std::size_t b) {
    for (int i = 0; i < batches[b].size; ++i) active.push_back(g.leaf_offset[b] + i);
    g.events.push_back({Event_kind::leaf_insertion, schedule.backward_time(b), -1,
                        static_cast<int>(b)});
  };

  // Batches in backward order: most recent first.
  auto next = static_cast<std::ptrdiff_t>(num_batches) - 1;
  auto s = 0.0;
  insert_batch(static_cast<std::size_t>(next--));
  while (active.size() > 1 || next >= 0) {
    auto p = static_cast<int>(active.size());
    auto rate = rates.total_rate(p);
    auto wait = rate > 0.0 ? -std::log(uniform_open(rng)) / rate : INFINITY;
    if (next >= 0 && s + wait >= schedule.backward_time(static_cast<std::size_t>(next))) {
      s = schedule.backward_time(static_cast<std::size_t>(next));
      insert_batch(static_cast<std::size_t>(next--));
      continue;
    }
    s += wait;
    auto k = rates.sample_merger_size(p, rng);
    // Partial Fisher-Yates: move a uniform k-subset to the back of `active`.
    for (int i = 0; i < k; ++i) {
      auto last = p - 1 - i;
      auto j = static_cast<int>(uniform_open(rng) * (last + 1));
      std::swap(active[std::min(j, last)], active[last]);
    }
    auto parent = static_cast<int>(g.nodes.size());
    g.nodes.push_back({s, -1, -1, -1, {}});
    for (int i = 0; i < k; ++i) {
      auto child = active[p - 1 - i];
      g.nodes[child].parent = parent;
      g.nodes[parent].children.push_back(child);
    }
    active.resize(p - k);
    active.push_back(parent);
    g.events.push_back({Event_kind::merge, s, parent, -1, k});
  }
  g.root = active.front();
  return g;
}

auto add_mutations(Genealogy& g, const Mutation_model& mutation, Rng& rng) -> void {
  g.root_type = mutation.sample_stationary(rng);
  g.nodes[g.root].type = g.root_type;
  auto stack = std::vector<int>{g.root};
  auto times = std::vector<double>{};
  while (!stack.empty()) {
    auto node = stack.back();
    stack.pop_back();
    for (auto child : g.nodes[node].children) {
      auto type = g.nodes[node].type;
      auto length = g.nodes[node].time - g.nodes[child].time;
      if (mutation.theta() > 0.0 && length > 0.0) {
        auto count = std::poisson_distribution<int>{mutation.theta() * length}(rng);
        times.clear();
        for (int i = 0; i < count; ++i) {
          times.push_back(g.nodes[child].time + uniform_open(rng) * length);
        }
        // Forward in time means decreasing backward time.
        std::sort(times.begin(), times.end(), std::greater<>{});
        for (auto t : times) {
          auto to = mutation.mutate(type, rng);
          g.events.push_back({Event_kind::mutation, t, child, -1, 0, type, to});
          type = to;
        }
      }
      g.nodes[child].type = type;
      stack.push_back(child);
    }
  }
  std::stable_sort(g.events.begin(), g.events.end(),
                   [](const auto& a, const auto& b) { return a.time < b.time; });
}

auto simulate_serial_coalescent(const Lambda_measure& measure, const Mutation_model& mutation,
                                const Sampling_schedule& schedule, std::uint64_t seed)
    -> Genealogy {
  auto rates = Rate_table::from_measure(measure, std::max(2, schedule.total_size()));
  auto rng = make_rng(seed);
  auto g = simulate_coalescent_tree(rates, schedule, rng);
  add_mutations(g, mutation, rng);
  return g;
}

auto Observation_batch::size() const -> int {
  auto total = 0;
  for (const auto& [label, count] : counts) total += count;
  return total;
}

auto Time_series_data::total_size() const -> int {
  auto total = 0;
  for (const auto& b : batches) total += b.size();
  return total;
}

auto Time_series_data::schedule() const -> Sampling_schedule {
  auto out = std::vector<Sampling_batch>{};
  for (const auto& b : batches) out.push_back({b.time, b.size()});
  return Sampling_schedule{std::move(out)};
}

auto genealogy_to_data(const Genealogy& genealogy, const Sampling_schedule& schedule,
                       const Mutation_model& mutation) -> Time_series_data {
  const auto& batches = schedule.batches();
  if (genealogy.leaf_offset.size() != batches.size()) {
    throw std::logic_error{"genealogy does not match the sampling schedule"};
  }
  auto data = Time_series_data{};
  for (std::size_t b = 0; b < batches.size(); ++b) {
    auto obs = Observation_batch{batches[b].time, {}};
    for (int i = 0; i < batches[b].size; ++i) {
      auto leaf = genealogy.leaf_offset[b] + i;
      if (leaf >= static_cast<int>(genealogy.nodes.size()) ||
          genealogy.nodes[leaf].batch != static_cast<int>(b) || genealogy.nodes[leaf].type < 0) {
        throw std::logic_error{"genealogy leaves do not match the sampling schedule"};
      }
      ++obs.counts[mutation.type_label(genealogy.nodes[leaf].type)];
    }
    data.batches.push_back(std::move(obs));
  }
  return data;
}

auto simulate_dataset(const Lambda_measure& measure, const Mutation_model& mutation,
                      const Sampling_schedule& schedule, std::uint64_t seed) -> Time_series_data {
  return genealogy_to_data(simulate_serial_coalescent(measure, mutation, schedule, seed), schedule,
                           mutation);
}

}  // namespace lambda_infer
