#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spf/pool.hpp"

namespace spf {

// Desire that the share of `attribute` taking one of `values` reach `target`.
struct ProportionalTarget {
  std::string attribute;
  std::vector<std::string> values;  // category set, e.g. {female, non_binary}
  double target = 0.5;              // in (0, 1]
  double weight = 1.0;

  bool operator==(const ProportionalTarget&) const = default;
};

// Desire that at least `min_distinct` categories of `attribute` be present.
struct CoverageTarget {
  std::string attribute;
  std::size_t min_distinct = 1;
  double weight = 1.0;

  bool operator==(const CoverageTarget&) const = default;
};

struct DiversitySpec {
  std::vector<ProportionalTarget> proportional;
  std::vector<CoverageTarget> coverage;

  // Throws Error(kInvalidSpec) on out-of-range parameters, an empty spec or
  // overlapping (attribute, value) pairs between proportional targets.
  void validate() const;
  // Additionally throws Error(kUnknownAttribute) for attributes outside the
  // pool schema.
  void validate(const ApplicantPool& pool) const;

  bool operator==(const DiversitySpec&) const = default;
};

// Merges the targets of two specs. Weights are kept as given.
DiversitySpec combine(const DiversitySpec& a, const DiversitySpec& b);

// Count threshold p*k for a cohort of size k. Products within 1e-9 of an
// integer snap to it so that, e.g., 0.3 * 10 means exactly three.
double proportional_threshold(double target, std::size_t k);

// A DiversitySpec compiled against a pool and a cohort size.
//
// D(c) = sum_i w_i * s_i(c) / sum_i w_i, where s_i is the truncated count
// min(count, p*k) / (p*k) for proportional targets and
// min(distinct, m) / m for coverage targets. Thresholds stay at their
// full-cohort values while a cohort is being grown, so a partial cohort can
// already saturate a target.
//
// All per-target arithmetic is on integer counters; value() and gain() sum
// the targets in a fixed order (proportional first, then coverage). Rounding
// is monotone, so value() is exactly monotone in the cohort and gain() is
// exactly non-increasing as the cohort grows.
class DiversityScorer {
 public:
  struct State {
    std::vector<std::uint32_t> counts;           // per proportional target
    std::vector<std::uint32_t> distinct;         // per coverage target
    std::vector<std::vector<std::uint8_t>> seen;  // per coverage target, per category
    std::size_t size = 0;
  };

  struct TargetStatus {
    bool coverage = false;
    std::string attribute;
    std::vector<std::string> values;  // empty for coverage targets
    std::size_t count = 0;            // matching members or distinct categories
    double threshold = 0.0;
    double score = 0.0;  // in [0, 1]
    double weight = 0.0;
    bool met = false;
  };

  DiversityScorer(const DiversitySpec& spec, const ApplicantPool& pool, std::size_t k);

  std::size_t cohort_size() const noexcept { return k_; }
  std::size_t pool_size() const noexcept { return pool_size_; }
  std::size_t target_count() const noexcept { return proportional_.size() + coverage_.size(); }

  State empty_state() const;
  void add(State& state, std::size_t applicant) const;

  double value(const State& state) const;
  double gain(const State& state, std::size_t applicant) const;
  double proportional_score(std::size_t target, const State& state) const;
  double coverage_score(std::size_t target, const State& state) const;

  State state_of(std::span<const std::size_t> cohort) const;
  double evaluate(std::span<const std::size_t> cohort) const { return value(state_of(cohort)); }

  std::vector<TargetStatus> breakdown(const State& state) const;
  // Sums breakdown entries exactly the way value() does.
  static double combine_breakdown(const std::vector<TargetStatus>& statuses);

 private:
  struct Proportional {
    std::vector<std::uint8_t> matches;  // per applicant
    double threshold;
    double weight;
    std::string attribute;
    std::vector<std::string> values;
  };
  struct Coverage {
    static constexpr std::uint32_t kNoCategory = UINT32_MAX;
    std::vector<std::uint32_t> category;  // per applicant; kNoCategory for "unknown"
    std::size_t category_count;
    std::size_t min_distinct;
    double weight;
    std::string attribute;
  };

  std::size_t k_;
  std::size_t pool_size_;
  std::vector<Proportional> proportional_;
  std::vector<Coverage> coverage_;
  double total_weight_ = 0.0;
};

// Convenience entry points over applicant ids. Each compiles a scorer for
// the call; use DiversityScorer directly in loops.
double eval_proportional(const ApplicantPool& pool, const ProportionalTarget& target,
                         std::span<const std::string> cohort, std::size_t k);
double eval_coverage(const ApplicantPool& pool, const CoverageTarget& target,
                     std::span<const std::string> cohort);
double eval_diversity(const ApplicantPool& pool, const DiversitySpec& spec,
                      std::span<const std::string> cohort, std::size_t k);
// Throws Error(kCandidateAlreadyPresent) if candidate is in cohort.
double marginal_gain(const ApplicantPool& pool, const DiversitySpec& spec,
                     std::span<const std::string> cohort, const std::string& candidate, std::size_t k);

}  // namespace spf
