#include "spf/oracle.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <limits>
#include <numeric>

#include "spf/error.hpp"

namespace spf {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) is divisible by i; cancel first to stay in range.
    const std::uint64_t g = std::gcd(result, i);
    const std::uint64_t factor = (n - k + i) / (i / g);
    if (result / g > kMax / factor) return kMax;
    result = result / g * factor;
  }
  return result;
}

std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t k, std::uint64_t rank) {
  std::vector<std::size_t> out;
  out.reserve(k);
  std::size_t next = 0;
  for (std::size_t slot = 0; slot < k; ++slot) {
    for (std::size_t v = next; v < n; ++v) {
      const auto with_v = binomial(n - v - 1, k - slot - 1);
      if (rank < with_v) {
        out.push_back(v);
        next = v + 1;
        break;
      }
      rank -= with_v;
    }
  }
  return out;
}

bool next_combination(std::span<std::size_t> c, std::size_t n) {
  const std::size_t k = c.size();
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

namespace {

// Enumeration over the free applicants with the pinned ones merged in.
class CohortSpace {
 public:
  CohortSpace(const Problem& problem, std::uint64_t budget) : problem_(problem) {
    std::vector<std::uint8_t> pinned(problem.size(), 0);
    for (auto i : problem.pinned()) pinned[i] = 1;
    for (std::size_t i = 0; i < problem.size(); ++i) {
      if (!pinned[i]) free_.push_back(i);
    }
    seats_ = problem.k() - problem.pinned().size();
    total_ = binomial(free_.size(), seats_);
    if (total_ > budget) {
      throw Error(ErrorCode::kBudgetExceeded, std::to_string(total_) + " cohorts exceed the enumeration budget of " +
                                                  std::to_string(budget));
    }
  }

  std::uint64_t total() const { return total_; }
  std::size_t seats() const { return seats_; }
  std::size_t free_count() const { return free_.size(); }

  // Sorted member indices for a combination of free slots.
  void members(std::span<const std::size_t> combination, std::vector<std::size_t>& out) const {
    out.clear();
    for (auto c : combination) out.push_back(free_[c]);
    const auto& pinned = problem_.pinned();
    out.insert(out.end(), pinned.begin(), pinned.end());
    std::inplace_merge(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(combination.size()), out.end());
  }

  // Visits combinations with ranks in [begin, end) in order.
  template <class Visit>
  void visit(std::uint64_t begin, std::uint64_t end, Visit&& visit_fn) const {
    if (begin >= end) return;
    auto combination = unrank_combination(free_.size(), seats_, begin);
    std::vector<std::size_t> cohort;
    for (std::uint64_t rank = begin; rank < end; ++rank) {
      members(combination, cohort);
      visit_fn(rank, std::span<const std::size_t>(cohort));
      next_combination(combination, free_.size());
    }
  }

  std::vector<std::size_t> members_at(std::uint64_t rank) const {
    std::vector<std::size_t> out;
    members(unrank_combination(free_.size(), seats_, rank), out);
    return out;
  }

 private:
  const Problem& problem_;
  std::vector<std::size_t> free_;
  std::size_t seats_ = 0;
  std::uint64_t total_ = 0;
};

Objectives score(const Problem& problem, std::span<const std::size_t> sorted_members) {
  return {problem.performance().evaluate_sorted(sorted_members), problem.diversity().evaluate(sorted_members)};
}

struct BestSoFar {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> ranks;

  void offer(double v, std::uint64_t rank) {
    if (v > value) {
      value = v;
      ranks.assign(1, rank);
    } else if (v == value) {
      ranks.push_back(rank);
    }
  }
};

ExactResult finish_opt(const CohortSpace& space, const Problem& problem, BestSoFar best) {
  ExactResult r;
  r.opt_objective = best.value;
  r.enumerated = space.total();
  std::sort(best.ranks.begin(), best.ranks.end());
  for (auto rank : best.ranks) r.opt_cohorts.push_back(problem.ids(space.members_at(rank)));
  return r;
}

struct RankedPoint {
  Objectives objectives;
  std::uint64_t rank;
};

// Pareto-filters ranked points, keeping rank order among survivors.
std::vector<RankedPoint> pareto_reduce(std::vector<RankedPoint> points) {
  std::vector<Objectives> obj;
  obj.reserve(points.size());
  for (const auto& p : points) obj.push_back(p.objectives);
  std::vector<RankedPoint> out;
  for (auto i : pareto_indices(obj)) out.push_back(points[i]);
  return out;
}

Frontier finish_frontier(const CohortSpace& space, const Problem& problem, const std::vector<RankedPoint>& survivors) {
  Frontier f;
  auto& prov = f.provenance;
  prov.pool_hash = problem.pool_hash();
  prov.spec_hash = problem.spec_hash();
  prov.k = problem.k();
  prov.steps = 0;
  prov.pinned.assign(problem.constraints().pinned.begin(), problem.constraints().pinned.end());
  prov.excluded.assign(problem.constraints().excluded.begin(), problem.constraints().excluded.end());
  for (const auto& p : survivors) {
    f.points.push_back(
        {std::nullopt, p.objectives.performance, p.objectives.diversity, problem.ids(space.members_at(p.rank))});
  }
  std::sort(f.points.begin(), f.points.end(),
            [](const FrontierPoint& a, const FrontierPoint& b) { return a.performance < b.performance; });
  return f;
}

// Chunks of the rank space handed to OpenMP workers. Ranks are processed in
// chunk order when merging, which keeps results identical to the serial
// enumeration.
std::vector<std::uint64_t> chunk_bounds(std::uint64_t total) {
  const std::uint64_t workers = static_cast<std::uint64_t>(std::max(1, omp_get_max_threads()));
  const std::uint64_t chunks = std::clamp<std::uint64_t>(total / 4096, 1, workers * 16);
  std::vector<std::uint64_t> bounds;
  for (std::uint64_t c = 0; c <= chunks; ++c) {
    bounds.push_back(total / chunks * c + total % chunks * c / chunks);
  }
  return bounds;
}

template <class Body>
void parallel_chunks(const std::vector<std::uint64_t>& bounds, Body&& body) {
  const auto chunks = static_cast<std::ptrdiff_t>(bounds.size() - 1);
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    try {
      body(c, bounds[c], bounds[c + 1]);
    } catch (...) {
#pragma omp critical(spf_oracle_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "alpha must lie in [0,1]");
}

}  // namespace

ExactResult exact_opt_serial(const Problem& problem, double alpha, std::uint64_t budget) {
  check_alpha(alpha);
  CohortSpace space(problem, budget);
  BestSoFar best;
  space.visit(0, space.total(), [&](std::uint64_t rank, std::span<const std::size_t> cohort) {
    const auto o = score(problem, cohort);
    best.offer(blend(alpha, o.performance, o.diversity), rank);
  });
  return finish_opt(space, problem, std::move(best));
}

ExactResult exact_opt(const Problem& problem, double alpha, std::uint64_t budget) {
  check_alpha(alpha);
  CohortSpace space(problem, budget);
  const auto bounds = chunk_bounds(space.total());
  std::vector<BestSoFar> partial(bounds.size() - 1);
  parallel_chunks(bounds, [&](std::ptrdiff_t c, std::uint64_t begin, std::uint64_t end) {
    auto& best = partial[c];
    space.visit(begin, end, [&](std::uint64_t rank, std::span<const std::size_t> cohort) {
      const auto o = score(problem, cohort);
      best.offer(blend(alpha, o.performance, o.diversity), rank);
    });
  });
  BestSoFar merged;
  for (const auto& p : partial) {
    for (auto rank : p.ranks) merged.offer(p.value, rank);
  }
  return finish_opt(space, problem, std::move(merged));
}

Frontier exact_frontier_serial(const Problem& problem, std::uint64_t budget) {
  CohortSpace space(problem, budget);
  std::vector<RankedPoint> all;
  all.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(space.total(), 1u << 20)));
  space.visit(0, space.total(), [&](std::uint64_t rank, std::span<const std::size_t> cohort) {
    all.push_back({score(problem, cohort), rank});
  });
  return finish_frontier(space, problem, pareto_reduce(std::move(all)));
}

Frontier exact_frontier(const Problem& problem, std::uint64_t budget) {
  CohortSpace space(problem, budget);
  const auto bounds = chunk_bounds(space.total());
  std::vector<std::vector<RankedPoint>> partial(bounds.size() - 1);
  parallel_chunks(bounds, [&](std::ptrdiff_t c, std::uint64_t begin, std::uint64_t end) {
    std::vector<RankedPoint> local;
    local.reserve(static_cast<std::size_t>(end - begin));
    space.visit(begin, end, [&](std::uint64_t rank, std::span<const std::size_t> cohort) {
      local.push_back({score(problem, cohort), rank});
    });
    partial[c] = pareto_reduce(std::move(local));
  });
  std::vector<RankedPoint> merged;
  for (auto& p : partial) merged.insert(merged.end(), p.begin(), p.end());
  return finish_frontier(space, problem, pareto_reduce(std::move(merged)));
}

}  // namespace spf
