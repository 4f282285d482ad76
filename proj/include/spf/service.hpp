#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "spf/diversity.hpp"
#include "spf/frontier.hpp"
#include "spf/performance.hpp"
#include "spf/pool.hpp"

namespace httplib {
class Server;
}

namespace spf {

struct ServiceOptions {
  // Requests with n * k * (steps + 1) above this run as background jobs.
  std::size_t job_threshold = 20'000'000;
  std::size_t workers = 2;
  std::optional<std::string> snapshot_dir;
};

struct Response {
  int status = 200;
  std::string body;  // JSON
};

// Session state and request handling for the frontier API, independent of
// the HTTP transport. Handlers take and return JSON text; errors are
// {"category", "message"} bodies with the matching status code.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // POST /pools. `pool_text` is delimiter-separated text or a JSON pool
  // document; `spec_text` is a diversity spec document.
  Response create_session(const std::string& pool_text, const std::string& spec_text,
                          std::optional<std::size_t> k = std::nullopt);
  // POST /sessions/{id}/frontier with {k, steps, pinned, excluded}.
  Response compute_frontier(const std::string& session_id, const std::string& body);
  // GET /sessions/{id}/frontier/{index}/cohort
  Response cohort_detail(const std::string& session_id, const std::string& index);
  // POST /sessions/{id}/gap with {cohort: [...]}
  Response gap(const std::string& session_id, const std::string& body);
  // GET /jobs/{id}
  Response job_status(const std::string& job_id);

  // Registers all routes on an httplib server.
  void mount(httplib::Server& server);

  // Blocks until every queued job has finished.
  void drain();

 private:
  struct CachedFrontier {
    std::shared_ptr<const Frontier> frontier;
    std::string document;
  };

  struct Session {
    std::string id;
    std::shared_ptr<const ApplicantPool> pool;
    DiversitySpec diversity;
    PerformanceSpec performance;
    std::optional<std::size_t> k;
    std::mutex mutex;  // guards everything below
    SelectionConstraints constraints;
    std::map<std::string, CachedFrontier> cache;  // keyed by constraint snapshot hash
    std::shared_ptr<const Frontier> latest;
  };

  struct Job {
    std::string status = "queued";  // queued, running, done, failed
    std::string result;             // frontier document or error body
  };

  std::shared_ptr<Session> find_session(const std::string& id) const;
  void persist(Session& session);
  void restore_snapshots();
  void enqueue(std::function<void()> task);
  void worker_loop();

  ServiceOptions options_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;

  std::mutex jobs_mutex_;
  std::map<std::string, Job> jobs_;

  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::condition_variable idle_cv_;
  std::deque<std::function<void()>> queue_;
  std::size_t active_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace spf
