#include "spf/performance.hpp"

#include <algorithm>

#include "spf/error.hpp"

namespace spf {

PerformanceScorer::PerformanceScorer(const PerformanceSpec& spec, const ApplicantPool& pool, std::size_t k)
    : k_(k) {
  if (spec.aggregator != Aggregator::kSumAsMeanProxy) {
    throw Error(ErrorCode::kInvalidSpec, "unsupported performance aggregator");
  }
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "cohort size must be at least 1");
  scores_.reserve(pool.size());
  for (const auto& a : pool.applicants()) scores_.push_back(a.score);
}

double PerformanceScorer::evaluate(std::span<const std::size_t> cohort) const {
  std::vector<std::size_t> sorted(cohort.begin(), cohort.end());
  std::sort(sorted.begin(), sorted.end());
  return evaluate_sorted(sorted);
}

double PerformanceScorer::evaluate_sorted(std::span<const std::size_t> cohort) const {
  double sum = 0.0;
  for (auto i : cohort) sum += scores_[i];
  return sum / static_cast<double>(k_);
}

double eval_performance(const ApplicantPool& pool, const PerformanceSpec& spec, std::span<const std::string> cohort,
                        std::size_t k) {
  if (cohort.size() > k) {
    throw Error(ErrorCode::kSizeMismatch, "cohort has more than k = " + std::to_string(k) + " members");
  }
  PerformanceScorer scorer(spec, pool, k);
  std::vector<std::size_t> idx;
  idx.reserve(cohort.size());
  for (const auto& id : cohort) idx.push_back(pool.index_of(id));
  return scorer.evaluate(idx);
}

}  // namespace spf
