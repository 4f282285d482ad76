#include "spf/greedy.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "spf/error.hpp"

namespace spf {

std::vector<double> ScalarizationGrid::alphas() const {
  if (steps < 1) throw Error(ErrorCode::kInvalidConfig, "scalarization grid needs at least one step");
  std::vector<double> out;
  out.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) out.push_back(static_cast<double>(i) / static_cast<double>(steps));
  return out;
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "alpha must lie in [0,1]");
}

// Shared bookkeeping of both variants: the growing cohort and its diversity
// counters.
class Builder {
 public:
  Builder(const Problem& problem, double alpha)
      : problem_(problem), alpha_(alpha), state_(problem.diversity().empty_state()),
        chosen_(problem.size(), 0) {
    check_alpha(alpha);
    for (auto i : problem.pinned()) {
      problem.diversity().add(state_, i);
      members_.push_back(i);
      chosen_[i] = 1;
    }
    trace_.alpha = alpha;
  }

  std::size_t remaining() const { return problem_.k() - members_.size(); }
  bool chosen(std::size_t i) const { return chosen_[i] != 0; }

  double gain(std::size_t i) {
    ++evaluations_;
    return blend(alpha_, problem_.performance().gain(i), problem_.diversity().gain(state_, i));
  }

  void pick(std::size_t i, double gain) {
    problem_.diversity().add(state_, i);
    members_.insert(std::upper_bound(members_.begin(), members_.end(), i), i);
    chosen_[i] = 1;
    trace_.picks.push_back({problem_.pool()[i].id, gain, current_objective()});
  }

  GreedyResult finish() {
    GreedyResult r;
    std::sort(members_.begin(), members_.end());
    trace_.final_objective = current_objective();
    r.cohort = problem_.ids(members_);
    r.members = std::move(members_);
    r.trace = std::move(trace_);
    r.gain_evaluations = evaluations_;
    return r;
  }

 private:
  double current_objective() const {
    return blend(alpha_, problem_.performance().evaluate_sorted(members_), problem_.diversity().value(state_));
  }

  const Problem& problem_;
  double alpha_;
  DiversityScorer::State state_;
  std::vector<std::uint8_t> chosen_;
  std::vector<std::size_t> members_;  // kept sorted
  GreedyTrace trace_;
  std::uint64_t evaluations_ = 0;
};

}  // namespace

GreedyResult greedy_cohort(const Problem& problem, double alpha) {
  Builder builder(problem, alpha);
  while (builder.remaining() > 0) {
    double best_gain = -std::numeric_limits<double>::infinity();
    std::size_t best = problem.size();
    for (auto i : problem.id_order()) {
      if (builder.chosen(i)) continue;
      const double g = builder.gain(i);
      if (g > best_gain) {
        best_gain = g;
        best = i;
      }
    }
    builder.pick(best, best_gain);
  }
  return builder.finish();
}

GreedyResult lazy_greedy_cohort(const Problem& problem, double alpha) {
  Builder builder(problem, alpha);

  struct Entry {
    double bound;
    std::size_t rank;  // position in id order
    std::size_t index;
    std::size_t stamp;  // pick round in which bound was computed
  };
  // Max-heap on bound; among equal bounds the smallest id surfaces first.
  auto lower_priority = [](const Entry& a, const Entry& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.rank > b.rank;
  };
  std::vector<Entry> heap_storage;
  heap_storage.reserve(problem.size());
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower_priority)> heap(lower_priority,
                                                                               std::move(heap_storage));

  if (builder.remaining() > 0) {
    const auto& order = problem.id_order();
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (!builder.chosen(order[r])) heap.push({builder.gain(order[r]), r, order[r], 0});
    }
  }

  std::size_t round = 0;
  while (builder.remaining() > 0) {
    Entry top = heap.top();
    heap.pop();
    if (top.stamp == round) {
      builder.pick(top.index, top.bound);
      ++round;
    } else {
      top.bound = builder.gain(top.index);
      top.stamp = round;
      heap.push(top);
    }
  }
  return builder.finish();
}

}  // namespace spf
