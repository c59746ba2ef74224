#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lambda_infer/measure.h"
#include "lambda_infer/mutation.h"
#include "lambda_infer/rates.h"
#include "lambda_infer/rng.h"

namespace lambda_infer {

struct Sampling_batch {
  double time;  // forward time; later batches are more recent
  int size;
};

class Sampling_schedule {
 public:
  explicit Sampling_schedule(std::vector<Sampling_batch> batches);

  // "0:20,0.5:20,1:20" -> batches; throws Data_error.
  static auto parse(const std::string& text) -> Sampling_schedule;

  auto batches() const -> const std::vector<Sampling_batch>& { return batches_; }
  auto total_size() const -> int;
  auto last_time() const -> double { return batches_.back().time; }
  // Backward time of batch b, measured from the most recent batch.
  auto backward_time(std::size_t b) const -> double { return last_time() - batches_[b].time; }

 private:
  std::vector<Sampling_batch> batches_;
};

enum class Event_kind { leaf_insertion, merge, mutation };

struct Genealogy_event {
  Event_kind kind;
  double time;      // backward time
  int node = -1;    // merge: new node; mutation: node below the mutated branch
  int batch = -1;   // leaf insertion
  int merged = 0;   // merge: number of blocks joined
  int from = -1;    // mutation
  int to = -1;
};

struct Genealogy_node {
  double time;      // backward time
  int parent = -1;
  int batch = -1;   // leaves only
  int type = -1;    // -1 when types were not simulated
  std::vector<int> children;
};

// Serial coalescent tree.  Leaves of batch b are nodes
// leaf_offset[b] .. leaf_offset[b] + size_b - 1.
struct Genealogy {
  std::vector<Genealogy_node> nodes;
  std::vector<Genealogy_event> events;  // sorted by backward time
  std::vector<int> leaf_offset;
  int root = -1;
  int root_type = -1;
};

// Tree only: block counts follow the Lambda-coalescent with the given rates,
// and each batch joins as fresh blocks when the backward clock reaches it.
auto simulate_coalescent_tree(const Rate_table& rates, const Sampling_schedule& schedule,
                              Rng& rng) -> Genealogy;

// Draws the root type from m and drops Poisson(theta) mutations on every branch.
auto add_mutations(Genealogy& genealogy, const Mutation_model& mutation, Rng& rng) -> void;

auto simulate_serial_coalescent(const Lambda_measure& measure, const Mutation_model& mutation,
                                const Sampling_schedule& schedule, std::uint64_t seed)
    -> Genealogy;

struct Observation_batch {
  double time;
  std::map<std::string, int> counts;

  auto size() const -> int;
};

struct Time_series_data {
  std::vector<Observation_batch> batches;  // strictly increasing times

  auto total_size() const -> int;
  auto schedule() const -> Sampling_schedule;
};

auto genealogy_to_data(const Genealogy& genealogy, const Sampling_schedule& schedule,
                       const Mutation_model& mutation) -> Time_series_data;

auto simulate_dataset(const Lambda_measure& measure, const Mutation_model& mutation,
                      const Sampling_schedule& schedule, std::uint64_t seed) -> Time_series_data;

}  // namespace lambda_infer
