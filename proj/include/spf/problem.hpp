#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spf/diversity.hpp"
#include "spf/performance.hpp"
#include "spf/pool.hpp"

namespace spf {

struct Objectives {
  double performance = 0.0;
  double diversity = 0.0;

  bool operator==(const Objectives&) const = default;
};

// F_alpha = alpha * P + (1 - alpha) * D. Every objective value in the
// library goes through this one expression.
inline double blend(double alpha, double performance, double diversity) {
  return alpha * performance + (1.0 - alpha) * diversity;
}

// A selection instance: the pool restricted by the constraints, with both
// scorers compiled against it. Cohorts are index vectors into pool().
class Problem {
 public:
  // Throws kPoolTooSmall when fewer than k applicants survive exclusion, and
  // propagates pool/spec validation errors.
  Problem(const ApplicantPool& pool, DiversitySpec diversity, PerformanceSpec performance,
          SelectionConstraints constraints);

  const ApplicantPool& pool() const noexcept { return pool_; }
  const DiversityScorer& diversity() const noexcept { return diversity_; }
  const PerformanceScorer& performance() const noexcept { return performance_; }
  const DiversitySpec& diversity_spec() const noexcept { return diversity_spec_; }
  const PerformanceSpec& performance_spec() const noexcept { return performance_spec_; }
  const SelectionConstraints& constraints() const noexcept { return constraints_; }

  std::size_t k() const noexcept { return constraints_.cohort_size; }
  std::size_t size() const noexcept { return pool_.size(); }
  // Pinned applicants as sorted indices into pool().
  const std::vector<std::size_t>& pinned() const noexcept { return pinned_; }
  // All indices ordered by ascending id; the greedy tie-break order.
  const std::vector<std::size_t>& id_order() const noexcept { return id_order_; }

  // Digest of the unrestricted source pool and of both specs.
  const std::string& pool_hash() const noexcept { return pool_hash_; }
  const std::string& spec_hash() const noexcept { return spec_hash_; }

  Objectives evaluate(std::span<const std::size_t> cohort) const;
  double objective(double alpha, std::span<const std::size_t> cohort) const {
    const auto o = evaluate(cohort);
    return blend(alpha, o.performance, o.diversity);
  }

  // Ids in pool order.
  std::vector<std::string> ids(std::span<const std::size_t> cohort) const;
  // Throws kUnknownId.
  std::vector<std::size_t> indices(std::span<const std::string> ids) const;

 private:
  ApplicantPool pool_;
  DiversitySpec diversity_spec_;
  PerformanceSpec performance_spec_;
  SelectionConstraints constraints_;
  DiversityScorer diversity_;
  PerformanceScorer performance_;
  std::vector<std::size_t> pinned_;
  std::vector<std::size_t> id_order_;
  std::string pool_hash_;
  std::string spec_hash_;
};

}  // namespace spf
