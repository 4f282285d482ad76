#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spf/pool.hpp"

namespace spf {

enum class Aggregator {
  // Sum of member scores divided by the fixed cohort size k. On full cohorts
  // this is the mean; on partial ones it stays modular, which the mean is not.
  kSumAsMeanProxy,
};

struct PerformanceSpec {
  Aggregator aggregator = Aggregator::kSumAsMeanProxy;
  std::string score_field = "score";

  bool operator==(const PerformanceSpec&) const = default;
};

class PerformanceScorer {
 public:
  PerformanceScorer(const PerformanceSpec& spec, const ApplicantPool& pool, std::size_t k);

  std::size_t cohort_size() const noexcept { return k_; }

  // Members are summed in pool order, so the result does not depend on the
  // order the cohort is listed in.
  double evaluate(std::span<const std::size_t> cohort) const;
  // Precondition: cohort is sorted ascending.
  double evaluate_sorted(std::span<const std::size_t> cohort) const;

  // score / k, independent of the rest of the cohort.
  double gain(std::size_t applicant) const { return scores_[applicant] / static_cast<double>(k_); }

  double score(std::size_t applicant) const { return scores_[applicant]; }

 private:
  std::size_t k_;
  std::vector<double> scores_;
};

double eval_performance(const ApplicantPool& pool, const PerformanceSpec& spec,
                        std::span<const std::string> cohort, std::size_t k);

}  // namespace spf
