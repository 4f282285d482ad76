#include "spf/problem.hpp"

#include <algorithm>
#include <numeric>

#include "spf/error.hpp"
#include "spf/serialize.hpp"

namespace spf {

namespace {

ApplicantPool checked_restrict(const ApplicantPool& pool, const SelectionConstraints& constraints) {
  constraints.validate(pool);
  auto restricted = restrict(pool, constraints);
  if (restricted.size() < constraints.cohort_size) {
    throw Error(ErrorCode::kPoolTooSmall, "pool has " + std::to_string(restricted.size()) +
                                              " eligible applicants, fewer than k = " +
                                              std::to_string(constraints.cohort_size));
  }
  return restricted;
}

}  // namespace

Problem::Problem(const ApplicantPool& pool, DiversitySpec diversity, PerformanceSpec performance,
                 SelectionConstraints constraints)
    : pool_(checked_restrict(pool, constraints)),
      diversity_spec_(std::move(diversity)),
      performance_spec_(std::move(performance)),
      constraints_(std::move(constraints)),
      diversity_(diversity_spec_, pool_, constraints_.cohort_size),
      performance_(performance_spec_, pool_, constraints_.cohort_size) {
  for (const auto& id : constraints_.pinned) pinned_.push_back(pool_.index_of(id));
  std::sort(pinned_.begin(), pinned_.end());

  id_order_.resize(pool_.size());
  std::iota(id_order_.begin(), id_order_.end(), std::size_t{0});
  std::sort(id_order_.begin(), id_order_.end(),
            [&](std::size_t a, std::size_t b) { return pool_[a].id < pool_[b].id; });

  pool_hash_ = pool_digest(pool);
  spec_hash_ = spec_digest(diversity_spec_, performance_spec_);
}

Objectives Problem::evaluate(std::span<const std::size_t> cohort) const {
  return {performance_.evaluate(cohort), diversity_.evaluate(cohort)};
}

std::vector<std::string> Problem::ids(std::span<const std::size_t> cohort) const {
  std::vector<std::size_t> sorted(cohort.begin(), cohort.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::string> out;
  out.reserve(sorted.size());
  for (auto i : sorted) out.push_back(pool_[i].id);
  return out;
}

std::vector<std::size_t> Problem::indices(std::span<const std::string> ids) const {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(pool_.index_of(id));
  return out;
}

}  // namespace spf
