#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spf/problem.hpp"

namespace spf {

// alpha_i = i / steps for i = 0..steps. The number of frontier steps is
// independent of the cohort size.
struct ScalarizationGrid {
  std::size_t steps = 20;

  std::vector<double> alphas() const;
};

struct GreedyPick {
  std::string id;
  double gain = 0.0;       // marginal F_alpha gain at the time of the pick
  double objective = 0.0;  // F_alpha of the cohort after the pick

  bool operator==(const GreedyPick&) const = default;
};

struct GreedyTrace {
  double alpha = 0.0;
  std::vector<GreedyPick> picks;  // k - |pinned| entries, in pick order
  double final_objective = 0.0;

  bool operator==(const GreedyTrace&) const = default;
};

struct GreedyResult {
  std::vector<std::size_t> members;  // sorted indices into Problem::pool()
  std::vector<std::string> cohort;   // ids in pool order
  GreedyTrace trace;
  std::uint64_t gain_evaluations = 0;
};

// Starts from the pinned set and repeatedly adds the candidate with the
// largest marginal F_alpha gain, breaking exact ties by smallest id.
// Serial reference: evaluates every remaining candidate at every step.
GreedyResult greedy_cohort(const Problem& problem, double alpha);

// Same picks as greedy_cohort on every input. Keeps stale gains in a max-heap
// and only re-evaluates the top candidate; stale values remain upper bounds
// because gains never increase as the cohort grows.
GreedyResult lazy_greedy_cohort(const Problem& problem, double alpha);

}  // namespace spf
