#include "spf/frontier.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <set>

#include "spf/error.hpp"

namespace spf {

std::vector<std::size_t> pareto_indices(std::span<const Objectives> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Best performance first; ties by diversity, then by input position so
  // the first of several identical points is the one kept.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].performance != points[b].performance) return points[a].performance > points[b].performance;
    if (points[a].diversity != points[b].diversity) return points[a].diversity > points[b].diversity;
    return a < b;
  });
  std::vector<std::size_t> kept;
  double best_diversity = -std::numeric_limits<double>::infinity();
  for (auto i : order) {
    if (points[i].diversity > best_diversity) {
      kept.push_back(i);
      best_diversity = points[i].diversity;
    }
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

namespace {

constexpr double kCollinearTolerance = 1e-12;

std::vector<Objectives> objectives_of(const std::vector<FrontierPoint>& points) {
  std::vector<Objectives> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.objectives());
  return out;
}

std::vector<FrontierPoint> select(std::vector<FrontierPoint> points, const std::vector<std::size_t>& indices) {
  std::vector<FrontierPoint> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(std::move(points[i]));
  return out;
}

}  // namespace

std::vector<FrontierPoint> pareto_filter(std::vector<FrontierPoint> points) {
  const auto kept = pareto_indices(objectives_of(points));
  return select(std::move(points), kept);
}

std::vector<std::size_t> convex_upper_indices(std::span<const Objectives> sorted) {
  // Andrew's monotone chain, upper half. A middle point is dropped when it
  // lies strictly below the chord joining its neighbours.
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    while (hull.size() >= 2) {
      const auto& a = sorted[hull[hull.size() - 2]];
      const auto& b = sorted[hull.back()];
      const auto& c = sorted[i];
      const double lhs = (b.performance - a.performance) * (c.diversity - a.diversity);
      const double rhs = (b.diversity - a.diversity) * (c.performance - a.performance);
      // Points within rounding of the chord count as on it.
      if (lhs - rhs > kCollinearTolerance * (std::abs(lhs) + std::abs(rhs))) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(i);
  }
  return hull;
}

std::vector<FrontierPoint> convex_upper_filter(std::vector<FrontierPoint> sorted) {
  const auto kept = convex_upper_indices(objectives_of(sorted));
  return select(std::move(sorted), kept);
}

namespace {

Frontier assemble(const Problem& problem, const ScalarizationGrid& grid, std::vector<GreedyResult> runs,
                  const std::vector<double>& alphas) {
  Frontier frontier;
  auto& prov = frontier.provenance;
  prov.pool_hash = problem.pool_hash();
  prov.spec_hash = problem.spec_hash();
  prov.k = problem.k();
  prov.steps = grid.steps;
  prov.pinned.assign(problem.constraints().pinned.begin(), problem.constraints().pinned.end());
  prov.excluded.assign(problem.constraints().excluded.begin(), problem.constraints().excluded.end());

  std::set<std::vector<std::size_t>> seen;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!seen.insert(runs[i].members).second) continue;
    const auto o = problem.evaluate(runs[i].members);
    prov.raw_points.push_back({alphas[i], o.performance, o.diversity, std::move(runs[i].cohort)});
  }

  auto points = pareto_filter(prov.raw_points);
  std::stable_sort(points.begin(), points.end(),
                   [](const FrontierPoint& a, const FrontierPoint& b) { return a.performance < b.performance; });
  frontier.points = convex_upper_filter(std::move(points));
  return frontier;
}

}  // namespace

Frontier build_frontier(const Problem& problem, const ScalarizationGrid& grid) {
  const auto alphas = grid.alphas();
  std::vector<GreedyResult> runs(alphas.size());
  const auto count = static_cast<std::ptrdiff_t>(alphas.size());

  // Each alpha is an independent greedy run; results land in their own slot
  // so the assembly below sees them in grid order.
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      runs[i] = lazy_greedy_cohort(problem, alphas[i]);
    } catch (...) {
#pragma omp critical(spf_frontier_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return assemble(problem, grid, std::move(runs), alphas);
}

Frontier build_frontier_serial(const Problem& problem, const ScalarizationGrid& grid) {
  const auto alphas = grid.alphas();
  std::vector<GreedyResult> runs;
  runs.reserve(alphas.size());
  for (double alpha : alphas) runs.push_back(greedy_cohort(problem, alpha));
  return assemble(problem, grid, std::move(runs), alphas);
}

Frontier build_frontier(const ApplicantPool& pool, const DiversitySpec& diversity,
                        const PerformanceSpec& performance, const SelectionConstraints& constraints,
                        const ScalarizationGrid& grid) {
  return build_frontier(Problem(pool, diversity, performance, constraints), grid);
}

double frontier_diversity_at(const Frontier& frontier, double performance) {
  const auto& pts = frontier.points;
  if (pts.empty()) throw Error(ErrorCode::kEmptyFrontier, "frontier has no points");
  if (performance <= pts.front().performance) return pts.front().diversity;
  if (performance >= pts.back().performance) return pts.back().diversity;
  auto hi = std::lower_bound(pts.begin(), pts.end(), performance,
                             [](const FrontierPoint& p, double v) { return p.performance < v; });
  if (hi->performance == performance) return hi->diversity;
  const auto lo = hi - 1;
  const double t = (performance - lo->performance) / (hi->performance - lo->performance);
  return lo->diversity + (hi->diversity - lo->diversity) * t;
}

std::optional<double> frontier_performance_at(const Frontier& frontier, double diversity) {
  const auto& pts = frontier.points;
  if (pts.empty()) throw Error(ErrorCode::kEmptyFrontier, "frontier has no points");
  if (diversity > pts.front().diversity) return std::nullopt;
  if (diversity <= pts.back().diversity) return pts.back().performance;
  // Diversity decreases along the points; find the first point at or below
  // the requested level.
  auto hi = std::find_if(pts.begin(), pts.end(), [&](const FrontierPoint& p) { return p.diversity <= diversity; });
  if (hi->diversity == diversity) return hi->performance;
  const auto lo = hi - 1;
  const double t = (lo->diversity - diversity) / (lo->diversity - hi->diversity);
  return lo->performance + (hi->performance - lo->performance) * t;
}

namespace {

double relative(double gain, double base) {
  if (gain == 0.0) return 0.0;
  if (base == 0.0) return std::numeric_limits<double>::infinity();
  return gain / base;
}

}  // namespace

ParetoGapReport pareto_gap(const Frontier& frontier, Objectives actual) {
  ParetoGapReport r;
  r.actual = actual;
  r.diversity_gain_abs = std::max(0.0, frontier_diversity_at(frontier, actual.performance) - actual.diversity);
  if (auto p = frontier_performance_at(frontier, actual.diversity)) {
    r.performance_gain_abs = std::max(0.0, *p - actual.performance);
  }
  r.diversity_gain_rel = relative(r.diversity_gain_abs, actual.diversity);
  r.performance_gain_rel = relative(r.performance_gain_abs, actual.performance);
  return r;
}

ParetoGapReport pareto_gap(const Frontier& frontier, const ApplicantPool& pool, const DiversitySpec& diversity,
                           const PerformanceSpec& performance, std::size_t k, std::span<const std::string> cohort) {
  if (frontier.points.empty()) throw Error(ErrorCode::kEmptyFrontier, "frontier has no points");
  std::vector<std::size_t> members;
  std::set<std::size_t> seen;
  for (const auto& id : cohort) {
    const auto i = pool.index_of(id);
    if (!seen.insert(i).second) throw Error(ErrorCode::kDuplicateId, "applicant '" + id + "' listed twice");
    members.push_back(i);
  }
  if (members.size() != k) {
    throw Error(ErrorCode::kSizeMismatch, "cohort has " + std::to_string(members.size()) +
                                              " members, expected k = " + std::to_string(k));
  }
  DiversityScorer dscorer(diversity, pool, k);
  PerformanceScorer pscorer(performance, pool, k);
  return pareto_gap(frontier, Objectives{pscorer.evaluate(members), dscorer.evaluate(members)});
}

}  // namespace spf
