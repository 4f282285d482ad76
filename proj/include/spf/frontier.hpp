#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spf/greedy.hpp"
#include "spf/problem.hpp"

namespace spf {

struct FrontierPoint {
  std::optional<double> alpha;  // empty for points of the exact frontier
  double performance = 0.0;
  double diversity = 0.0;
  std::vector<std::string> cohort;  // ids in pool order

  Objectives objectives() const { return {performance, diversity}; }
  bool operator==(const FrontierPoint&) const = default;
};

struct FrontierProvenance {
  std::string pool_hash;
  std::string spec_hash;
  std::size_t k = 0;
  std::size_t steps = 0;  // 0 for the exact frontier
  std::vector<std::string> pinned;
  std::vector<std::string> excluded;
  // Deduplicated greedy outputs before Pareto and convex filtering.
  std::vector<FrontierPoint> raw_points;

  bool operator==(const FrontierProvenance&) const = default;
};

// Points sorted by ascending performance, hence strictly descending
// diversity, and mutually non-dominated.
struct Frontier {
  std::vector<FrontierPoint> points;
  FrontierProvenance provenance;

  bool operator==(const Frontier&) const = default;
};

// Indices of the points not weakly dominated by another point, in input
// order. Of several identical points only the first survives.
std::vector<std::size_t> pareto_indices(std::span<const Objectives> points);
std::vector<FrontierPoint> pareto_filter(std::vector<FrontierPoint> points);

// Upper hull of a Pareto-filtered list sorted by performance: keeps the
// points on or above every chord between their neighbours. Endpoints are
// always kept; points on a chord, up to rounding, are kept.
std::vector<std::size_t> convex_upper_indices(std::span<const Objectives> sorted);
std::vector<FrontierPoint> convex_upper_filter(std::vector<FrontierPoint> sorted);

// Runs the greedy optimizer at every grid alpha, deduplicates cohorts, and
// applies the Pareto and convex filters. Alphas are fanned out over OpenMP
// threads; the result is independent of the thread count.
Frontier build_frontier(const Problem& problem, const ScalarizationGrid& grid);
// Single-threaded reference using the non-lazy greedy.
Frontier build_frontier_serial(const Problem& problem, const ScalarizationGrid& grid);

Frontier build_frontier(const ApplicantPool& pool, const DiversitySpec& diversity,
                        const PerformanceSpec& performance, const SelectionConstraints& constraints,
                        const ScalarizationGrid& grid);

// The frontier as a piecewise-linear curve d = f(p), flat beyond its ends.
// Throws kEmptyFrontier.
double frontier_diversity_at(const Frontier& frontier, double performance);
// Largest performance whose frontier diversity is at least `diversity`,
// capped at the frontier's maximum performance; nullopt when the frontier
// never reaches that diversity.
std::optional<double> frontier_performance_at(const Frontier& frontier, double diversity);

struct ParetoGapReport {
  Objectives actual;
  double diversity_gain_abs = 0.0;
  double diversity_gain_rel = 0.0;  // relative to actual diversity; inf when that is 0
  double performance_gain_abs = 0.0;
  double performance_gain_rel = 0.0;

  bool operator==(const ParetoGapReport&) const = default;
};

ParetoGapReport pareto_gap(const Frontier& frontier, Objectives actual);

// Evaluates `cohort` on `pool` under the given specs and compares it to the
// frontier. Throws kUnknownId, kDuplicateId, kSizeMismatch, kEmptyFrontier.
ParetoGapReport pareto_gap(const Frontier& frontier, const ApplicantPool& pool, const DiversitySpec& diversity,
                           const PerformanceSpec& performance, std::size_t k,
                           std::span<const std::string> cohort);

}  // namespace spf
