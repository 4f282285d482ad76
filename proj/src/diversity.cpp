#include "spf/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "spf/error.hpp"

namespace spf {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

std::vector<std::size_t> indices_of(const ApplicantPool& pool, std::span<const std::string> ids) {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  std::set<std::size_t> seen;
  for (const auto& id : ids) {
    const auto i = pool.index_of(id);
    if (!seen.insert(i).second) {
      throw Error(ErrorCode::kDuplicateId, "applicant '" + id + "' listed twice in cohort");
    }
    out.push_back(i);
  }
  return out;
}

}  // namespace

void DiversitySpec::validate() const {
  if (proportional.empty() && coverage.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "diversity spec needs at least one target");
  }
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& t : proportional) {
    if (t.attribute.empty()) throw Error(ErrorCode::kInvalidSpec, "proportional target without attribute");
    if (t.values.empty()) {
      throw Error(ErrorCode::kInvalidSpec, "proportional target on '" + t.attribute + "' has no values");
    }
    if (!(t.target > 0.0 && t.target <= 1.0)) {
      throw Error(ErrorCode::kInvalidSpec, "proportional target on '" + t.attribute + "' must be in (0,1]");
    }
    if (!positive_finite(t.weight)) {
      throw Error(ErrorCode::kInvalidSpec, "weight of target on '" + t.attribute + "' must be positive");
    }
    for (const auto& v : t.values) {
      if (!pairs.emplace(t.attribute, v).second) {
        throw Error(ErrorCode::kInvalidSpec,
                    "two proportional targets share (" + t.attribute + ", " + v + ")");
      }
    }
  }
  for (const auto& t : coverage) {
    if (t.attribute.empty()) throw Error(ErrorCode::kInvalidSpec, "coverage target without attribute");
    if (t.min_distinct < 1) {
      throw Error(ErrorCode::kInvalidSpec, "coverage target on '" + t.attribute + "' needs min_distinct >= 1");
    }
    if (!positive_finite(t.weight)) {
      throw Error(ErrorCode::kInvalidSpec, "weight of target on '" + t.attribute + "' must be positive");
    }
  }
}

void DiversitySpec::validate(const ApplicantPool& pool) const {
  validate();
  auto check = [&](const std::string& attribute) {
    if (!pool.has_attribute(attribute)) {
      throw Error(ErrorCode::kUnknownAttribute, "attribute '" + attribute + "' is not in the pool schema");
    }
  };
  for (const auto& t : proportional) check(t.attribute);
  for (const auto& t : coverage) check(t.attribute);
}

DiversitySpec combine(const DiversitySpec& a, const DiversitySpec& b) {
  DiversitySpec out = a;
  out.proportional.insert(out.proportional.end(), b.proportional.begin(), b.proportional.end());
  out.coverage.insert(out.coverage.end(), b.coverage.begin(), b.coverage.end());
  return out;
}

double proportional_threshold(double target, std::size_t k) {
  const double raw = target * static_cast<double>(k);
  const double nearest = std::round(raw);
  if (std::abs(raw - nearest) <= 1e-9 * std::max(1.0, raw)) return nearest;
  return raw;
}

DiversityScorer::DiversityScorer(const DiversitySpec& spec, const ApplicantPool& pool, std::size_t k)
    : k_(k), pool_size_(pool.size()) {
  spec.validate(pool);
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "cohort size must be at least 1");

  for (const auto& t : spec.proportional) {
    Proportional p;
    p.threshold = proportional_threshold(t.target, k);
    p.weight = t.weight;
    p.attribute = t.attribute;
    p.values = t.values;
    p.matches.resize(pool.size());
    const std::set<std::string> wanted(t.values.begin(), t.values.end());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      p.matches[i] = wanted.count(pool[i].attributes.at(t.attribute)) ? 1 : 0;
    }
    proportional_.push_back(std::move(p));
  }
  for (const auto& t : spec.coverage) {
    Coverage c;
    c.min_distinct = t.min_distinct;
    c.weight = t.weight;
    c.attribute = t.attribute;
    const auto& schema = pool.schema();
    const auto& categories =
        std::find_if(schema.begin(), schema.end(), [&](const auto& s) { return s.name == t.attribute; })
            ->categories;
    c.category_count = categories.size();
    c.category.resize(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const auto& v = pool[i].attributes.at(t.attribute);
      if (v == kUnknownCategory) {
        c.category[i] = Coverage::kNoCategory;
      } else {
        c.category[i] = static_cast<std::uint32_t>(
            std::lower_bound(categories.begin(), categories.end(), v) - categories.begin());
      }
    }
    coverage_.push_back(std::move(c));
  }
  for (const auto& p : proportional_) total_weight_ += p.weight;
  for (const auto& c : coverage_) total_weight_ += c.weight;
}

DiversityScorer::State DiversityScorer::empty_state() const {
  State s;
  s.counts.assign(proportional_.size(), 0);
  s.distinct.assign(coverage_.size(), 0);
  s.seen.reserve(coverage_.size());
  for (const auto& c : coverage_) s.seen.emplace_back(c.category_count, 0);
  return s;
}

void DiversityScorer::add(State& state, std::size_t applicant) const {
  for (std::size_t t = 0; t < proportional_.size(); ++t) state.counts[t] += proportional_[t].matches[applicant];
  for (std::size_t t = 0; t < coverage_.size(); ++t) {
    const auto cat = coverage_[t].category[applicant];
    if (cat != Coverage::kNoCategory && !state.seen[t][cat]) {
      state.seen[t][cat] = 1;
      ++state.distinct[t];
    }
  }
  ++state.size;
}

double DiversityScorer::proportional_score(std::size_t target, const State& state) const {
  const double count = state.counts[target];
  const double threshold = proportional_[target].threshold;
  return count >= threshold ? 1.0 : count / threshold;
}

double DiversityScorer::coverage_score(std::size_t target, const State& state) const {
  const auto m = coverage_[target].min_distinct;
  const auto present = state.distinct[target];
  return present >= m ? 1.0 : static_cast<double>(present) / static_cast<double>(m);
}

double DiversityScorer::value(const State& state) const {
  double sum = 0.0;
  for (std::size_t t = 0; t < proportional_.size(); ++t) sum += proportional_[t].weight * proportional_score(t, state);
  for (std::size_t t = 0; t < coverage_.size(); ++t) sum += coverage_[t].weight * coverage_score(t, state);
  return sum / total_weight_;
}

double DiversityScorer::gain(const State& state, std::size_t applicant) const {
  double sum = 0.0;
  for (std::size_t t = 0; t < proportional_.size(); ++t) {
    const auto& p = proportional_[t];
    double delta = 0.0;
    if (p.matches[applicant]) {
      const double count = state.counts[t];
      if (count + 1.0 <= p.threshold) {
        delta = 1.0 / p.threshold;
      } else if (count < p.threshold) {
        delta = (p.threshold - count) / p.threshold;
      }
    }
    sum += p.weight * delta;
  }
  for (std::size_t t = 0; t < coverage_.size(); ++t) {
    const auto& c = coverage_[t];
    const auto cat = c.category[applicant];
    double delta = 0.0;
    if (cat != Coverage::kNoCategory && !state.seen[t][cat] && state.distinct[t] < c.min_distinct) {
      delta = 1.0 / static_cast<double>(c.min_distinct);
    }
    sum += c.weight * delta;
  }
  return sum / total_weight_;
}

DiversityScorer::State DiversityScorer::state_of(std::span<const std::size_t> cohort) const {
  State s = empty_state();
  for (auto i : cohort) add(s, i);
  return s;
}

std::vector<DiversityScorer::TargetStatus> DiversityScorer::breakdown(const State& state) const {
  std::vector<TargetStatus> out;
  out.reserve(target_count());
  for (std::size_t t = 0; t < proportional_.size(); ++t) {
    const auto& p = proportional_[t];
    TargetStatus s;
    s.attribute = p.attribute;
    s.values = p.values;
    s.count = state.counts[t];
    s.threshold = p.threshold;
    s.score = proportional_score(t, state);
    s.weight = p.weight;
    s.met = s.score == 1.0;
    out.push_back(std::move(s));
  }
  for (std::size_t t = 0; t < coverage_.size(); ++t) {
    const auto& c = coverage_[t];
    TargetStatus s;
    s.coverage = true;
    s.attribute = c.attribute;
    s.count = state.distinct[t];
    s.threshold = static_cast<double>(c.min_distinct);
    s.score = coverage_score(t, state);
    s.weight = c.weight;
    s.met = s.score == 1.0;
    out.push_back(std::move(s));
  }
  return out;
}

double DiversityScorer::combine_breakdown(const std::vector<TargetStatus>& statuses) {
  double sum = 0.0;
  double total = 0.0;
  for (const auto& s : statuses) total += s.weight;
  for (const auto& s : statuses) sum += s.weight * s.score;
  return sum / total;
}

double eval_proportional(const ApplicantPool& pool, const ProportionalTarget& target,
                         std::span<const std::string> cohort, std::size_t k) {
  DiversityScorer scorer(DiversitySpec{{target}, {}}, pool, k);
  return scorer.proportional_score(0, scorer.state_of(indices_of(pool, cohort)));
}

double eval_coverage(const ApplicantPool& pool, const CoverageTarget& target, std::span<const std::string> cohort) {
  DiversityScorer scorer(DiversitySpec{{}, {target}}, pool, std::max<std::size_t>(1, cohort.size()));
  return scorer.coverage_score(0, scorer.state_of(indices_of(pool, cohort)));
}

double eval_diversity(const ApplicantPool& pool, const DiversitySpec& spec, std::span<const std::string> cohort,
                      std::size_t k) {
  DiversityScorer scorer(spec, pool, k);
  return scorer.evaluate(indices_of(pool, cohort));
}

double marginal_gain(const ApplicantPool& pool, const DiversitySpec& spec, std::span<const std::string> cohort,
                     const std::string& candidate, std::size_t k) {
  if (std::find(cohort.begin(), cohort.end(), candidate) != cohort.end()) {
    throw Error(ErrorCode::kCandidateAlreadyPresent, "applicant '" + candidate + "' is already in the cohort");
  }
  DiversityScorer scorer(spec, pool, k);
  const auto x = pool.index_of(candidate);
  return scorer.gain(scorer.state_of(indices_of(pool, cohort)), x);
}

}  // namespace spf
