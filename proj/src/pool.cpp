#include "spf/pool.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "spf/csv.hpp"
#include "spf/error.hpp"

namespace spf {

std::string_view category_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "io";
    case ErrorCode::kMalformedRow: return "malformed_row";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kScoreOutOfRange: return "score_out_of_range";
    case ErrorCode::kUnknownId: return "unknown_id";
    case ErrorCode::kPinExcludeConflict: return "pin_exclude_conflict";
    case ErrorCode::kUnknownAttribute: return "unknown_attribute";
    case ErrorCode::kInvalidSpec: return "invalid_spec";
    case ErrorCode::kCandidateAlreadyPresent: return "candidate_already_present";
    case ErrorCode::kPoolTooSmall: return "pool_too_small";
    case ErrorCode::kBudgetExceeded: return "budget_exceeded";
    case ErrorCode::kEmptyFrontier: return "empty_frontier";
    case ErrorCode::kSizeMismatch: return "size_mismatch";
    case ErrorCode::kInvalidConfig: return "invalid_config";
    case ErrorCode::kMalformedRequest: return "malformed_request";
  }
  return "unknown";
}

namespace {

void check_score(const Applicant& a) {
  if (!(a.score >= 0.0 && a.score <= 1.0)) {
    throw Error(ErrorCode::kScoreOutOfRange,
                "score " + format_double(a.score) + " of applicant '" + a.id + "' is outside [0,1]");
  }
}

}  // namespace

ApplicantPool::ApplicantPool(std::vector<std::string> attribute_names, std::vector<Applicant> applicants)
    : applicants_(std::move(applicants)) {
  {
    std::set<std::string> seen;
    for (const auto& name : attribute_names) {
      if (name.empty()) throw Error(ErrorCode::kMalformedRow, "empty attribute name");
      if (!seen.insert(name).second) {
        throw Error(ErrorCode::kMalformedRow, "duplicate attribute column '" + name + "'");
      }
    }
  }
  std::vector<std::set<std::string>> categories(attribute_names.size());
  for (auto& a : applicants_) {
    if (a.id.empty()) throw Error(ErrorCode::kMalformedRow, "applicant with empty id");
    check_score(a);
    for (const auto& [key, value] : a.attributes) {
      if (std::find(attribute_names.begin(), attribute_names.end(), key) == attribute_names.end()) {
        throw Error(ErrorCode::kUnknownAttribute,
                    "applicant '" + a.id + "' has attribute '" + key + "' outside the schema");
      }
    }
    for (std::size_t c = 0; c < attribute_names.size(); ++c) {
      auto& value = a.attributes[attribute_names[c]];
      if (value.empty()) value = std::string(kUnknownCategory);
      categories[c].insert(value);
    }
  }
  schema_.reserve(attribute_names.size());
  for (std::size_t c = 0; c < attribute_names.size(); ++c) {
    schema_.push_back({attribute_names[c], {categories[c].begin(), categories[c].end()}});
  }
  build_index();
}

ApplicantPool::ApplicantPool(KeepSchema, std::vector<AttributeSchema> schema, std::vector<Applicant> applicants)
    : schema_(std::move(schema)), applicants_(std::move(applicants)) {
  build_index();
}

void ApplicantPool::build_index() {
  index_.clear();
  index_.reserve(applicants_.size());
  for (std::size_t i = 0; i < applicants_.size(); ++i) {
    if (!index_.emplace(applicants_[i].id, i).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate applicant id '" + applicants_[i].id + "'");
    }
  }
}

std::vector<std::string> ApplicantPool::attribute_names() const {
  std::vector<std::string> names;
  names.reserve(schema_.size());
  for (const auto& s : schema_) names.push_back(s.name);
  return names;
}

bool ApplicantPool::has_attribute(std::string_view name) const {
  return std::any_of(schema_.begin(), schema_.end(), [&](const auto& s) { return s.name == name; });
}

std::optional<std::size_t> ApplicantPool::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ApplicantPool::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw Error(ErrorCode::kUnknownId, "unknown applicant id '" + std::string(id) + "'");
}

void SelectionConstraints::validate(const ApplicantPool& pool) const {
  if (cohort_size < 1) throw Error(ErrorCode::kInvalidConfig, "cohort size must be at least 1");
  for (const auto& id : pinned) pool.index_of(id);
  for (const auto& id : excluded) pool.index_of(id);
  for (const auto& id : pinned) {
    if (excluded.count(id)) {
      throw Error(ErrorCode::kPinExcludeConflict, "applicant '" + id + "' is both pinned and excluded");
    }
  }
  if (pinned.size() > cohort_size) {
    throw Error(ErrorCode::kInvalidConfig, std::to_string(pinned.size()) +
                                               " pinned applicants exceed cohort size " +
                                               std::to_string(cohort_size));
  }
}

ApplicantPool restrict(const ApplicantPool& pool, const SelectionConstraints& constraints) {
  for (const auto& id : constraints.pinned) pool.index_of(id);
  for (const auto& id : constraints.pinned) {
    if (constraints.excluded.count(id)) {
      throw Error(ErrorCode::kPinExcludeConflict, "applicant '" + id + "' is both pinned and excluded");
    }
  }
  std::vector<Applicant> kept;
  kept.reserve(pool.size());
  for (const auto& a : pool.applicants()) {
    if (!constraints.excluded.count(a.id)) kept.push_back(a);
  }
  return ApplicantPool(ApplicantPool::KeepSchema{}, pool.schema(), std::move(kept));
}

namespace {

double parse_score(const std::string& text, std::size_t line) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  while (last != first && (last[-1] == ' ' || last[-1] == '\t')) --last;
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw Error(ErrorCode::kMalformedRow,
                "line " + std::to_string(line) + ": score '" + text + "' is not a number");
  }
  return value;
}

}  // namespace

ApplicantPool load_pool(std::istream& in, const PoolFormat& format) {
  csv::Reader reader(in, format.delimiter);
  auto header = reader.next();
  if (!header) throw Error(ErrorCode::kMalformedRow, "missing header row");
  auto& columns = header->fields;
  if (!columns.empty() && columns[0].rfind("\xEF\xBB\xBF", 0) == 0) columns[0].erase(0, 3);

  std::optional<std::size_t> id_col, score_col;
  std::vector<std::size_t> attr_cols;
  std::vector<std::string> attr_names;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == format.id_column && !id_col) {
      id_col = c;
    } else if (columns[c] == format.score_column && !score_col) {
      score_col = c;
    } else {
      attr_cols.push_back(c);
      attr_names.push_back(columns[c]);
    }
  }
  if (!id_col || !score_col) {
    throw Error(ErrorCode::kMalformedRow,
                "header must contain '" + format.id_column + "' and '" + format.score_column + "' columns");
  }
  if (format.attributes) {
    auto expected = *format.attributes;
    auto got = attr_names;
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    if (expected != got) throw Error(ErrorCode::kMalformedRow, "attribute columns do not match the declared schema");
  }

  std::vector<Applicant> applicants;
  std::set<std::string> ids;
  while (auto record = reader.next()) {
    const auto& f = record->fields;
    if (f.size() == 1 && f[0].empty()) continue;  // blank line
    if (f.size() != columns.size()) {
      throw Error(ErrorCode::kMalformedRow, "line " + std::to_string(record->line) + ": expected " +
                                                std::to_string(columns.size()) + " fields, got " +
                                                std::to_string(f.size()));
    }
    Applicant a;
    a.id = f[*id_col];
    if (a.id.empty()) throw Error(ErrorCode::kMalformedRow, "line " + std::to_string(record->line) + ": empty id");
    if (!ids.insert(a.id).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "line " + std::to_string(record->line) + ": duplicate applicant id '" + a.id + "'");
    }
    a.score = parse_score(f[*score_col], record->line);
    check_score(a);
    for (std::size_t c = 0; c < attr_cols.size(); ++c) {
      a.attributes.emplace(attr_names[c], f[attr_cols[c]]);
    }
    applicants.push_back(std::move(a));
  }
  return ApplicantPool(std::move(attr_names), std::move(applicants));
}

ApplicantPool load_pool_file(const std::string& path, const PoolFormat& format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open pool file '" + path + "'");
  return load_pool(in, format);
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_pool(std::ostream& out, const ApplicantPool& pool, char delimiter) {
  out << "id" << delimiter << "score";
  for (const auto& s : pool.schema()) out << delimiter << csv::escape(s.name, delimiter);
  out << '\n';
  for (const auto& a : pool.applicants()) {
    out << csv::escape(a.id, delimiter) << delimiter << format_double(a.score);
    for (const auto& s : pool.schema()) {
      const auto& v = a.attributes.at(s.name);
      // "unknown" is written as an empty cell so that it reloads as missing.
      out << delimiter << (v == kUnknownCategory ? std::string() : csv::escape(v, delimiter));
    }
    out << '\n';
  }
}

}  // namespace spf
