#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spf/frontier.hpp"
#include "spf/problem.hpp"

namespace spf {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

// n choose k, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// The rank-th k-combination of {0..n-1} in lexicographic order.
std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t k, std::uint64_t rank);
// Advances to the lexicographic successor; false after the last combination.
bool next_combination(std::span<std::size_t> combination, std::size_t n);

struct ExactResult {
  double opt_objective = 0.0;
  std::vector<std::vector<std::string>> opt_cohorts;  // every maximizer, lexicographic order
  std::uint64_t enumerated = 0;                        // C(n', k') over free applicants
};

// Enumerates every admissible cohort (pinned applicants fixed, the remaining
// k - |pinned| seats drawn from the other applicants). Throws
// kBudgetExceeded when that count is above `budget`.
ExactResult exact_opt(const Problem& problem, double alpha, std::uint64_t budget = kDefaultEnumerationBudget);
ExactResult exact_opt_serial(const Problem& problem, double alpha,
                             std::uint64_t budget = kDefaultEnumerationBudget);

// The true selection possibility frontier: all Pareto-efficient (P, D)
// pairs with the first cohort (in enumeration order) attaining each. No
// convex filtering.
Frontier exact_frontier(const Problem& problem, std::uint64_t budget = kDefaultEnumerationBudget);
Frontier exact_frontier_serial(const Problem& problem, std::uint64_t budget = kDefaultEnumerationBudget);

}  // namespace spf
