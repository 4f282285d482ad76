#include "spf/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "spf/csv.hpp"
#include "spf/error.hpp"

namespace spf {

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string pool_digest(const ApplicantPool& pool) {
  std::ostringstream out;
  write_pool(out, pool);
  return fnv1a_hex(out.str());
}

std::string spec_digest(const DiversitySpec& diversity, const PerformanceSpec& performance) {
  Json doc = diversity_spec_to_json(diversity);
  doc["performance"] = performance_spec_to_json(performance);
  return fnv1a_hex(doc.dump());
}

namespace {

[[noreturn]] void bad_spec(const std::string& what) { throw Error(ErrorCode::kInvalidSpec, what); }

const Json& require(const Json& obj, const char* key, ErrorCode code) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(code, std::string("missing key '") + key + "'");
  return *it;
}

void only_keys(const Json& obj, std::initializer_list<std::string_view> allowed, ErrorCode code) {
  if (!obj.is_object()) throw Error(code, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) throw Error(code, "unexpected key '" + it.key() + "'");
  }
}

std::vector<std::string> string_list(const Json& v, ErrorCode code, const char* what) {
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) throw Error(code, std::string(what) + " must be a list of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw Error(code, std::string(what) + " must be a list of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

double number(const Json& v, ErrorCode code, const char* what) {
  if (!v.is_number()) throw Error(code, std::string(what) + " must be a number");
  return v.get<double>();
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json pool_to_json(const ApplicantPool& pool) {
  Json applicants = Json::array();
  for (const auto& a : pool.applicants()) {
    Json attrs = Json::object();
    for (const auto& [k, v] : a.attributes) attrs[k] = v;
    applicants.push_back({{"id", a.id}, {"score", a.score}, {"attributes", attrs}});
  }
  return {{"attributes", pool.attribute_names()}, {"applicants", applicants}};
}

ApplicantPool pool_from_json(const Json& doc) {
  constexpr auto kCode = ErrorCode::kMalformedRow;
  only_keys(doc, {"attributes", "applicants"}, kCode);
  auto names = string_list(require(doc, "attributes", kCode), kCode, "attributes");
  const auto& list = require(doc, "applicants", kCode);
  if (!list.is_array()) throw Error(kCode, "applicants must be a list");
  std::vector<Applicant> applicants;
  for (const auto& e : list) {
    only_keys(e, {"id", "score", "attributes"}, kCode);
    Applicant a;
    const auto& id = require(e, "id", kCode);
    if (!id.is_string()) throw Error(kCode, "applicant id must be a string");
    a.id = id.get<std::string>();
    a.score = number(require(e, "score", kCode), kCode, "score");
    if (auto it = e.find("attributes"); it != e.end()) {
      if (!it->is_object()) throw Error(kCode, "applicant attributes must be an object");
      for (auto kv = it->begin(); kv != it->end(); ++kv) {
        if (!kv->is_string()) throw Error(kCode, "attribute values must be strings");
        a.attributes[kv.key()] = kv->get<std::string>();
      }
    }
    applicants.push_back(std::move(a));
  }
  return ApplicantPool(std::move(names), std::move(applicants));
}

Json diversity_spec_to_json(const DiversitySpec& spec) {
  Json prop = Json::array();
  for (const auto& t : spec.proportional) {
    prop.push_back({{"attribute", t.attribute}, {"values", t.values}, {"target", t.target}, {"weight", t.weight}});
  }
  Json cov = Json::array();
  for (const auto& t : spec.coverage) {
    cov.push_back({{"attribute", t.attribute}, {"min_distinct", t.min_distinct}, {"weight", t.weight}});
  }
  return {{"proportional", prop}, {"coverage", cov}};
}

DiversitySpec diversity_spec_from_json(const Json& doc) {
  constexpr auto kCode = ErrorCode::kInvalidSpec;
  only_keys(doc, {"proportional", "coverage", "performance"}, kCode);
  DiversitySpec spec;
  if (auto it = doc.find("proportional"); it != doc.end()) {
    if (!it->is_array()) bad_spec("proportional must be a list");
    for (const auto& e : *it) {
      only_keys(e, {"attribute", "values", "value", "target", "weight"}, kCode);
      ProportionalTarget t;
      const auto& attr = require(e, "attribute", kCode);
      if (!attr.is_string()) bad_spec("attribute must be a string");
      t.attribute = attr.get<std::string>();
      if (e.contains("values") == e.contains("value")) bad_spec("give exactly one of 'values' or 'value'");
      t.values = string_list(e.contains("values") ? e["values"] : e["value"], kCode, "values");
      t.target = number(require(e, "target", kCode), kCode, "target");
      if (e.contains("weight")) t.weight = number(e["weight"], kCode, "weight");
      spec.proportional.push_back(std::move(t));
    }
  }
  if (auto it = doc.find("coverage"); it != doc.end()) {
    if (!it->is_array()) bad_spec("coverage must be a list");
    for (const auto& e : *it) {
      only_keys(e, {"attribute", "min_distinct", "weight"}, kCode);
      CoverageTarget t;
      const auto& attr = require(e, "attribute", kCode);
      if (!attr.is_string()) bad_spec("attribute must be a string");
      t.attribute = attr.get<std::string>();
      const auto& m = require(e, "min_distinct", kCode);
      if (!m.is_number_integer() || m.get<long long>() < 1) bad_spec("min_distinct must be a positive integer");
      t.min_distinct = m.get<std::size_t>();
      if (e.contains("weight")) t.weight = number(e["weight"], kCode, "weight");
      spec.coverage.push_back(std::move(t));
    }
  }
  spec.validate();
  return spec;
}

Json performance_spec_to_json(const PerformanceSpec& spec) {
  return {{"aggregator", "sum_as_mean_proxy"}, {"score_field", spec.score_field}};
}

PerformanceSpec performance_spec_from_json(const Json& doc) {
  PerformanceSpec spec;
  auto it = doc.find("performance");
  if (it == doc.end()) return spec;
  only_keys(*it, {"aggregator", "score_field"}, ErrorCode::kInvalidSpec);
  if (auto a = it->find("aggregator"); a != it->end()) {
    if (!a->is_string() || a->get<std::string>() != "sum_as_mean_proxy") {
      bad_spec("unsupported performance aggregator");
    }
  }
  if (auto f = it->find("score_field"); f != it->end()) {
    if (!f->is_string() || f->get<std::string>().empty()) bad_spec("score_field must be a non-empty string");
    spec.score_field = f->get<std::string>();
  }
  return spec;
}

SelectionConstraints constraints_from_json(const Json& doc, std::size_t default_k) {
  constexpr auto kCode = ErrorCode::kInvalidConfig;
  only_keys(doc, {"k", "pinned", "excluded"}, kCode);
  SelectionConstraints c;
  c.cohort_size = default_k;
  if (auto it = doc.find("k"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 1) throw Error(kCode, "k must be a positive integer");
    c.cohort_size = it->get<std::size_t>();
  }
  if (auto it = doc.find("pinned"); it != doc.end()) {
    for (auto& id : string_list(*it, kCode, "pinned")) c.pinned.insert(std::move(id));
  }
  if (auto it = doc.find("excluded"); it != doc.end()) {
    for (auto& id : string_list(*it, kCode, "excluded")) c.excluded.insert(std::move(id));
  }
  return c;
}

Json constraints_to_json(const SelectionConstraints& c) {
  return {{"k", c.cohort_size},
          {"pinned", std::vector<std::string>(c.pinned.begin(), c.pinned.end())},
          {"excluded", std::vector<std::string>(c.excluded.begin(), c.excluded.end())}};
}

namespace {

Json point_to_json(const FrontierPoint& p) {
  return {{"alpha", p.alpha ? Json(*p.alpha) : Json(nullptr)},
          {"performance", p.performance},
          {"diversity", p.diversity},
          {"cohort", p.cohort}};
}

FrontierPoint point_from_json(const Json& j) {
  constexpr auto kCode = ErrorCode::kMalformedRow;
  only_keys(j, {"alpha", "performance", "diversity", "cohort"}, kCode);
  FrontierPoint p;
  const auto& alpha = require(j, "alpha", kCode);
  if (!alpha.is_null()) p.alpha = number(alpha, kCode, "alpha");
  p.performance = number(require(j, "performance", kCode), kCode, "performance");
  p.diversity = number(require(j, "diversity", kCode), kCode, "diversity");
  p.cohort = string_list(require(j, "cohort", kCode), kCode, "cohort");
  return p;
}

}  // namespace

Json frontier_to_json(const Frontier& f) {
  Json points = Json::array();
  for (const auto& p : f.points) points.push_back(point_to_json(p));
  Json raw = Json::array();
  for (const auto& p : f.provenance.raw_points) raw.push_back(point_to_json(p));
  const auto& prov = f.provenance;
  return {{"points", points},
          {"provenance",
           {{"pool_hash", prov.pool_hash},
            {"spec_hash", prov.spec_hash},
            {"k", prov.k},
            {"steps", prov.steps},
            {"pinned", prov.pinned},
            {"excluded", prov.excluded},
            {"raw_points", raw}}}};
}

Frontier frontier_from_json(const Json& doc) {
  constexpr auto kCode = ErrorCode::kMalformedRow;
  only_keys(doc, {"points", "provenance"}, kCode);
  Frontier f;
  for (const auto& p : require(doc, "points", kCode)) f.points.push_back(point_from_json(p));
  const auto& prov = require(doc, "provenance", kCode);
  only_keys(prov, {"pool_hash", "spec_hash", "k", "steps", "pinned", "excluded", "raw_points"}, kCode);
  f.provenance.pool_hash = require(prov, "pool_hash", kCode).get<std::string>();
  f.provenance.spec_hash = require(prov, "spec_hash", kCode).get<std::string>();
  f.provenance.k = require(prov, "k", kCode).get<std::size_t>();
  f.provenance.steps = require(prov, "steps", kCode).get<std::size_t>();
  f.provenance.pinned = string_list(require(prov, "pinned", kCode), kCode, "pinned");
  f.provenance.excluded = string_list(require(prov, "excluded", kCode), kCode, "excluded");
  for (const auto& p : require(prov, "raw_points", kCode)) f.provenance.raw_points.push_back(point_from_json(p));
  return f;
}

std::string frontier_document(const Frontier& frontier) { return frontier_to_json(frontier).dump(2) + "\n"; }

void write_frontier_csv(std::ostream& out, const Frontier& frontier) {
  out << "alpha,performance,diversity,cohort_ids\n";
  for (const auto& p : frontier.points) {
    std::string ids;
    for (std::size_t i = 0; i < p.cohort.size(); ++i) {
      if (i) ids.push_back(';');
      ids += p.cohort[i];
    }
    out << (p.alpha ? format_double(*p.alpha) : std::string()) << ',' << format_double(p.performance) << ','
        << format_double(p.diversity) << ',' << csv::escape(ids) << '\n';
  }
}

std::vector<FrontierPoint> read_frontier_csv(std::istream& in) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || header->fields != std::vector<std::string>{"alpha", "performance", "diversity", "cohort_ids"}) {
    throw Error(ErrorCode::kMalformedRow, "unexpected frontier header");
  }
  auto parse = [](const std::string& s, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw Error(ErrorCode::kMalformedRow, "line " + std::to_string(line) + ": bad number '" + s + "'");
    }
    return v;
  };
  std::vector<FrontierPoint> points;
  while (auto r = reader.next()) {
    if (r->fields.size() == 1 && r->fields[0].empty()) continue;
    if (r->fields.size() != 4) throw Error(ErrorCode::kMalformedRow, "line " + std::to_string(r->line) + ": expected 4 fields");
    FrontierPoint p;
    if (!r->fields[0].empty()) p.alpha = parse(r->fields[0], r->line);
    p.performance = parse(r->fields[1], r->line);
    p.diversity = parse(r->fields[2], r->line);
    std::stringstream ids(r->fields[3]);
    for (std::string id; std::getline(ids, id, ';');) p.cohort.push_back(id);
    points.push_back(std::move(p));
  }
  return points;
}

Json gap_report_to_json(const ParetoGapReport& r) {
  return {{"actual", {{"performance", r.actual.performance}, {"diversity", r.actual.diversity}}},
          {"diversity_gain_abs", r.diversity_gain_abs},
          {"diversity_gain_rel", finite_or_null(r.diversity_gain_rel)},
          {"performance_gain_abs", r.performance_gain_abs},
          {"performance_gain_rel", finite_or_null(r.performance_gain_rel)},
          {"interpolation", "piecewise_linear"},
          {"extension", "flat"}};
}

Json read_json_file(const std::string& path) {
  const auto text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kInvalidSpec, "'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path + "'");
}

}  // namespace spf
