#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spf/diversity.hpp"
#include "spf/frontier.hpp"
#include "spf/performance.hpp"
#include "spf/pool.hpp"

namespace spf {

using Json = nlohmann::json;

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

std::string pool_digest(const ApplicantPool& pool);
std::string spec_digest(const DiversitySpec& diversity, const PerformanceSpec& performance);

// Structured-text forms. Parsers throw Error with the loader's category
// (kInvalidSpec for malformed spec documents, kMalformedRow for pools).
Json pool_to_json(const ApplicantPool& pool);
ApplicantPool pool_from_json(const Json& doc);

Json diversity_spec_to_json(const DiversitySpec& spec);
DiversitySpec diversity_spec_from_json(const Json& doc);

// The spec document may carry an optional "performance" object alongside
// "proportional" and "coverage"; it defaults to the sum-as-mean aggregator.
PerformanceSpec performance_spec_from_json(const Json& doc);
Json performance_spec_to_json(const PerformanceSpec& spec);

// {"pinned": [...], "excluded": [...]} plus an optional "k".
SelectionConstraints constraints_from_json(const Json& doc, std::size_t default_k);
Json constraints_to_json(const SelectionConstraints& constraints);

Json frontier_to_json(const Frontier& frontier);
Frontier frontier_from_json(const Json& doc);
// The canonical byte form shared by the CLI and the HTTP service.
std::string frontier_document(const Frontier& frontier);

// Columns alpha, performance, diversity, cohort_ids (';'-joined).
void write_frontier_csv(std::ostream& out, const Frontier& frontier);
std::vector<FrontierPoint> read_frontier_csv(std::istream& in);

Json gap_report_to_json(const ParetoGapReport& report);

Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view contents);

}  // namespace spf
