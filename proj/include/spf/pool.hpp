#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace spf {

// Reserved category for missing attribute cells. It can be targeted
// explicitly but never matches any other category.
inline constexpr std::string_view kUnknownCategory = "unknown";

struct Applicant {
  std::string id;
  double score = 0.0;  // in [0, 1]
  std::map<std::string, std::string> attributes;

  bool operator==(const Applicant&) const = default;
};

struct AttributeSchema {
  std::string name;
  std::vector<std::string> categories;  // sorted, unique

  bool operator==(const AttributeSchema&) const = default;
};

struct SelectionConstraints;

// Immutable roster of applicants. Row order is preserved from the source and
// is the canonical order for cohorts drawn from the pool.
class ApplicantPool {
 public:
  ApplicantPool() = default;

  // Validates ids and scores, fills missing attributes with "unknown" and
  // derives the observed category sets.
  ApplicantPool(std::vector<std::string> attribute_names, std::vector<Applicant> applicants);

  std::size_t size() const noexcept { return applicants_.size(); }
  bool empty() const noexcept { return applicants_.empty(); }
  const std::vector<Applicant>& applicants() const noexcept { return applicants_; }
  const Applicant& operator[](std::size_t i) const { return applicants_[i]; }

  const std::vector<AttributeSchema>& schema() const noexcept { return schema_; }
  std::vector<std::string> attribute_names() const;
  bool has_attribute(std::string_view name) const;

  std::optional<std::size_t> find(std::string_view id) const;
  // Throws Error(kUnknownId).
  std::size_t index_of(std::string_view id) const;

  bool operator==(const ApplicantPool& other) const {
    return schema_ == other.schema_ && applicants_ == other.applicants_;
  }

 private:
  friend ApplicantPool restrict(const ApplicantPool&, const SelectionConstraints&);
  struct KeepSchema {};
  ApplicantPool(KeepSchema, std::vector<AttributeSchema> schema, std::vector<Applicant> applicants);

  void build_index();

  std::vector<AttributeSchema> schema_;
  std::vector<Applicant> applicants_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct SelectionConstraints {
  std::size_t cohort_size = 1;
  std::set<std::string> pinned;
  std::set<std::string> excluded;

  // Throws kInvalidConfig, kUnknownId or kPinExcludeConflict.
  void validate(const ApplicantPool& pool) const;
};

// Removes excluded applicants, keeping row order and the full schema of the
// source pool so that diversity specs resolve identically on the result.
// Excluded ids already absent are ignored, so restrict is idempotent.
ApplicantPool restrict(const ApplicantPool& pool, const SelectionConstraints& constraints);

struct PoolFormat {
  char delimiter = ',';
  std::string id_column = "id";
  std::string score_column = "score";
  // When set, the header must contain exactly these attribute columns.
  std::optional<std::vector<std::string>> attributes;
};

// Reads delimiter-separated text with a header row. Empty attribute cells
// become "unknown". Throws kDuplicateId, kScoreOutOfRange, kMalformedRow.
ApplicantPool load_pool(std::istream& in, const PoolFormat& format = {});
ApplicantPool load_pool_file(const std::string& path, const PoolFormat& format = {});

// Writes id, score, then the schema's attribute columns.
void write_pool(std::ostream& out, const ApplicantPool& pool, char delimiter = ',');

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

}  // namespace spf
