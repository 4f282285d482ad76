#include "spf/service.hpp"

#include <httplib.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "spf/error.hpp"
#include "spf/problem.hpp"
#include "spf/serialize.hpp"

namespace spf {

namespace {

Response error_response(int status, std::string_view category, const std::string& message) {
  return {status, Json{{"category", category}, {"message", message}}.dump()};
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPinExcludeConflict:
    case ErrorCode::kEmptyFrontier:
      return 409;
    case ErrorCode::kPoolTooSmall:
    case ErrorCode::kSizeMismatch:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kBudgetExceeded:
      return 422;
    default:
      return 400;
  }
}

Response from_error(const Error& e) { return error_response(status_for(e.code()), e.category(), e.what()); }

std::string random_token() {
  static std::mutex mutex;
  static std::mt19937_64 engine{std::random_device{}()};
  std::lock_guard lock(mutex);
  return fnv1a_hex(std::to_string(engine())) + fnv1a_hex(std::to_string(engine()));
}

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  try {
    auto doc = Json::parse(body);
    if (!doc.is_object()) throw Error(ErrorCode::kMalformedRequest, "request body must be a JSON object");
    return doc;
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kMalformedRequest, std::string("request body is not valid JSON: ") + e.what());
  }
}

ApplicantPool parse_pool(const std::string& text, const std::string& score_column) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return pool_from_json(Json::parse(text));
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kMalformedRow, std::string("pool document is not valid JSON: ") + e.what());
    }
  }
  std::istringstream in(text);
  PoolFormat format;
  format.score_column = score_column;
  return load_pool(in, format);
}

std::size_t estimated_work(std::size_t n, std::size_t k, std::size_t steps) { return n * k * (steps + 1); }

}  // namespace

Service::Service(ServiceOptions options) : options_(std::move(options)) {
  if (options_.snapshot_dir) restore_snapshots();
  const auto count = std::max<std::size_t>(1, options_.workers);
  for (std::size_t i = 0; i < count; ++i) workers_.emplace_back([this] { worker_loop(); });
}

Service::~Service() {
  {
    std::lock_guard lock(queue_mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  for (auto& t : workers_) t.join();
}

void Service::enqueue(std::function<void()> task) {
  {
    std::lock_guard lock(queue_mutex_);
    queue_.push_back(std::move(task));
  }
  queue_cv_.notify_one();
}

void Service::worker_loop() {
  for (;;) {
    std::function<void()> task;
    {
      std::unique_lock lock(queue_mutex_);
      queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      task = std::move(queue_.front());
      queue_.pop_front();
      ++active_;
    }
    task();
    {
      std::lock_guard lock(queue_mutex_);
      --active_;
    }
    idle_cv_.notify_all();
  }
}

void Service::drain() {
  std::unique_lock lock(queue_mutex_);
  idle_cv_.wait(lock, [&] { return queue_.empty() && active_ == 0; });
}

std::shared_ptr<Service::Session> Service::find_session(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

void Service::persist(Session& session) {
  if (!options_.snapshot_dir) return;
  Json spec = diversity_spec_to_json(session.diversity);
  spec["performance"] = performance_spec_to_json(session.performance);
  Json doc{{"session_id", session.id},
           {"pool", pool_to_json(*session.pool)},
           {"spec", spec},
           {"k", session.k ? Json(*session.k) : Json(nullptr)},
           {"constraints", constraints_to_json(session.constraints)}};
  std::filesystem::create_directories(*options_.snapshot_dir);
  const auto path = std::filesystem::path(*options_.snapshot_dir) / (session.id + ".json");
  write_text_file(path.string(), doc.dump(2) + "\n");
}

void Service::restore_snapshots() {
  const std::filesystem::path dir(*options_.snapshot_dir);
  if (!std::filesystem::exists(dir)) return;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    const auto doc = read_json_file(entry.path().string());
    auto s = std::make_shared<Session>();
    s->id = doc.at("session_id").get<std::string>();
    s->pool = std::make_shared<const ApplicantPool>(pool_from_json(doc.at("pool")));
    s->diversity = diversity_spec_from_json(doc.at("spec"));
    s->performance = performance_spec_from_json(doc.at("spec"));
    if (!doc.at("k").is_null()) s->k = doc.at("k").get<std::size_t>();
    s->constraints = constraints_from_json(doc.at("constraints"), 1);
    sessions_[s->id] = std::move(s);
  }
}

Response Service::create_session(const std::string& pool_text, const std::string& spec_text,
                                 std::optional<std::size_t> k) {
  try {
    Json spec_doc;
    try {
      spec_doc = Json::parse(spec_text);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kInvalidSpec, std::string("spec is not valid JSON: ") + e.what());
    }
    auto diversity = diversity_spec_from_json(spec_doc);
    auto performance = performance_spec_from_json(spec_doc);
    auto pool = std::make_shared<const ApplicantPool>(parse_pool(pool_text, performance.score_field));
    diversity.validate(*pool);
    if (k && *k < 1) throw Error(ErrorCode::kInvalidConfig, "k must be positive");

    auto s = std::make_shared<Session>();
    s->id = random_token();
    s->pool = pool;
    s->diversity = std::move(diversity);
    s->performance = std::move(performance);
    s->k = k;
    if (k) s->constraints.cohort_size = *k;

    Json schema = Json::array();
    for (const auto& a : pool->schema()) schema.push_back({{"attribute", a.name}, {"categories", a.categories}});
    Json body{{"session_id", s->id}, {"size", pool->size()}, {"schema", schema}};
    {
      std::lock_guard lock(s->mutex);
      persist(*s);
    }
    {
      std::unique_lock lock(sessions_mutex_);
      sessions_[s->id] = s;
    }
    return {201, body.dump()};
  } catch (const Error& e) {
    return from_error(e);
  }
}

Response Service::compute_frontier(const std::string& session_id, const std::string& body) {
  auto session = find_session(session_id);
  if (!session) return error_response(404, "unknown_session", "no session '" + session_id + "'");
  try {
    const auto req = parse_body(body);
    for (auto it = req.begin(); it != req.end(); ++it) {
      if (it.key() != "k" && it.key() != "steps" && it.key() != "pinned" && it.key() != "excluded") {
        throw Error(ErrorCode::kInvalidConfig, "unexpected key '" + it.key() + "'");
      }
    }
    std::size_t steps = 20;
    if (auto it = req.find("steps"); it != req.end()) {
      if (!it->is_number_integer() || it->get<long long>() < 1) {
        throw Error(ErrorCode::kInvalidConfig, "steps must be a positive integer");
      }
      steps = it->get<std::size_t>();
    }
    if (!req.contains("k") && !session->k) throw Error(ErrorCode::kInvalidConfig, "k is required");
    Json constraint_doc = req;
    constraint_doc.erase("steps");
    const auto constraints = constraints_from_json(constraint_doc, session->k.value_or(1));

    Problem problem(*session->pool, session->diversity, session->performance, constraints);
    const std::string key = fnv1a_hex(constraints_to_json(constraints).dump() + "/" + std::to_string(steps));

    {
      std::lock_guard lock(session->mutex);
      session->constraints = constraints;
      persist(*session);
      if (auto hit = session->cache.find(key); hit != session->cache.end()) {
        session->latest = hit->second.frontier;
        return {200, hit->second.document};
      }
    }

    auto run = [session, key, steps](const Problem& p) {
      auto frontier = std::make_shared<const Frontier>(build_frontier(p, ScalarizationGrid{steps}));
      auto document = frontier_document(*frontier);
      std::lock_guard lock(session->mutex);
      session->cache[key] = {frontier, document};
      session->latest = frontier;
      return document;
    };

    if (estimated_work(problem.size(), problem.k(), steps) <= options_.job_threshold) {
      return {200, run(problem)};
    }

    const auto job_id = random_token();
    {
      std::lock_guard lock(jobs_mutex_);
      jobs_[job_id] = Job{};
    }
    auto shared_problem = std::make_shared<const Problem>(std::move(problem));
    enqueue([this, job_id, shared_problem, run] {
      {
        std::lock_guard lock(jobs_mutex_);
        jobs_[job_id].status = "running";
      }
      std::string status = "done", result;
      try {
        result = run(*shared_problem);
      } catch (const Error& e) {
        status = "failed";
        result = from_error(e).body;
      } catch (const std::exception& e) {
        status = "failed";
        result = error_response(500, "internal", e.what()).body;
      }
      std::lock_guard lock(jobs_mutex_);
      jobs_[job_id] = Job{status, std::move(result)};
    });
    return {202, Json{{"job_id", job_id}, {"status", "queued"}, {"poll", "/jobs/" + job_id}}.dump()};
  } catch (const Error& e) {
    return from_error(e);
  }
}

Response Service::job_status(const std::string& job_id) {
  std::lock_guard lock(jobs_mutex_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) return error_response(404, "unknown_job", "no job '" + job_id + "'");
  Json body{{"job_id", job_id}, {"status", it->second.status}};
  if (it->second.status == "done") body["frontier"] = Json::parse(it->second.result);
  if (it->second.status == "failed") body["error"] = Json::parse(it->second.result);
  return {200, body.dump()};
}

Response Service::cohort_detail(const std::string& session_id, const std::string& index) {
  auto session = find_session(session_id);
  if (!session) return error_response(404, "unknown_session", "no session '" + session_id + "'");
  std::shared_ptr<const Frontier> frontier;
  {
    std::lock_guard lock(session->mutex);
    frontier = session->latest;
  }
  if (!frontier) return error_response(404, "not_found", "no frontier has been computed for this session");
  std::size_t i = 0;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(index, &used);
    if (used != index.size()) throw std::invalid_argument(index);
    i = static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    return error_response(404, "not_found", "bad point index '" + index + "'");
  }
  if (i >= frontier->points.size()) {
    return error_response(404, "not_found", "point index " + index + " is past the end of the frontier");
  }
  try {
    const auto& point = frontier->points[i];
    const auto& pool = *session->pool;
    const auto k = frontier->provenance.k;
    DiversityScorer scorer(session->diversity, pool, k);
    std::vector<std::size_t> members;
    Json people = Json::array();
    for (const auto& id : point.cohort) {
      const auto idx = pool.index_of(id);
      members.push_back(idx);
      people.push_back({{"id", id}, {"score", pool[idx].score}, {"attributes", pool[idx].attributes}});
    }
    const auto statuses = scorer.breakdown(scorer.state_of(members));
    Json targets = Json::array();
    for (const auto& t : statuses) {
      targets.push_back({{"kind", t.coverage ? "coverage" : "proportional"},
                         {"attribute", t.attribute},
                         {"values", t.values},
                         {"count", t.count},
                         {"threshold", t.threshold},
                         {"score", t.score},
                         {"weight", t.weight},
                         {"met", t.met}});
    }
    Json body{{"index", i},
              {"alpha", point.alpha ? Json(*point.alpha) : Json(nullptr)},
              {"performance", point.performance},
              {"diversity", point.diversity},
              {"members", people},
              {"targets", targets},
              {"diversity_from_targets", DiversityScorer::combine_breakdown(statuses)}};
    return {200, body.dump()};
  } catch (const Error& e) {
    return from_error(e);
  }
}

Response Service::gap(const std::string& session_id, const std::string& body) {
  auto session = find_session(session_id);
  if (!session) return error_response(404, "unknown_session", "no session '" + session_id + "'");
  try {
    const auto req = parse_body(body);
    auto it = req.find("cohort");
    if (it == req.end() || !it->is_array()) throw Error(ErrorCode::kInvalidConfig, "body needs a 'cohort' list");
    std::vector<std::string> cohort;
    for (const auto& id : *it) {
      if (!id.is_string()) throw Error(ErrorCode::kInvalidConfig, "cohort ids must be strings");
      cohort.push_back(id.get<std::string>());
    }
    std::shared_ptr<const Frontier> frontier;
    {
      std::lock_guard lock(session->mutex);
      frontier = session->latest;
    }
    if (!frontier) throw Error(ErrorCode::kEmptyFrontier, "compute a frontier for this session first");
    const auto report = pareto_gap(*frontier, *session->pool, session->diversity, session->performance,
                                   frontier->provenance.k, cohort);
    return {200, gap_report_to_json(report).dump()};
  } catch (const Error& e) {
    return from_error(e);
  }
}

namespace {

bool accepts_json(const httplib::Request& req) {
  if (!req.has_header("Accept")) return true;
  const auto accept = req.get_header_value("Accept");
  return accept.empty() || accept.find("application/json") != std::string::npos ||
         accept.find("*/*") != std::string::npos || accept.find("application/*") != std::string::npos;
}

void reply(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body, "application/json");
}

}  // namespace

void Service::mount(httplib::Server& server) {
  server.set_pre_routing_handler([](const httplib::Request& req, httplib::Response& res) {
    if (accepts_json(req)) return httplib::Server::HandlerResponse::Unhandled;
    reply(res, error_response(406, "not_acceptable", "responses are application/json"));
    return httplib::Server::HandlerResponse::Handled;
  });

  server.Post("/pools", [this](const httplib::Request& req, httplib::Response& res) {
    std::string pool_text, spec_text;
    std::optional<std::size_t> k;
    try {
      if (req.is_multipart_form_data()) {
        if (!req.has_file("pool") || !req.has_file("spec")) {
          throw Error(ErrorCode::kInvalidConfig, "multipart upload needs 'pool' and 'spec' parts");
        }
        pool_text = req.get_file_value("pool").content;
        spec_text = req.get_file_value("spec").content;
        if (req.has_file("k")) k = std::stoul(req.get_file_value("k").content);
      } else {
        const auto doc = parse_body(req.body);
        if (!doc.contains("pool") || !doc.contains("spec")) {
          throw Error(ErrorCode::kInvalidConfig, "body needs 'pool' and 'spec'");
        }
        pool_text = doc["pool"].is_string() ? doc["pool"].get<std::string>() : doc["pool"].dump();
        spec_text = doc["spec"].dump();
        if (doc.contains("k")) {
          if (!doc["k"].is_number_integer()) throw Error(ErrorCode::kInvalidConfig, "k must be an integer");
          k = doc["k"].get<std::size_t>();
        }
      }
    } catch (const Error& e) {
      return reply(res, from_error(e));
    } catch (const std::exception& e) {
      return reply(res, error_response(400, "invalid_config", e.what()));
    }
    reply(res, create_session(pool_text, spec_text, k));
  });

  server.Post(R"(/sessions/([^/]+)/frontier)", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, compute_frontier(req.matches[1], req.body));
  });
  server.Get(R"(/sessions/([^/]+)/frontier/([^/]+)/cohort)",
             [this](const httplib::Request& req, httplib::Response& res) {
               reply(res, cohort_detail(req.matches[1], req.matches[2]));
             });
  server.Post(R"(/sessions/([^/]+)/gap)", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, gap(req.matches[1], req.body));
  });
  server.Get(R"(/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, job_status(req.matches[1]));
  });
}

}  // namespace spf
