#include "spf/cli.hpp"

#include <CLI11.hpp>
#include <httplib.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "spf/error.hpp"
#include "spf/frontier.hpp"
#include "spf/oracle.hpp"
#include "spf/plot.hpp"
#include "spf/serialize.hpp"
#include "spf/service.hpp"
#include "spf/synth.hpp"

namespace spf {

namespace {

struct RunConfig {
  std::string pool_path;
  std::string spec_path;
  std::size_t k = 0;
  std::size_t steps = 20;
  std::string constraints_path;
  std::string out_path;
  std::string plot_path;
  int threads = 0;
  std::uint64_t seed = 42;
};

struct Inputs {
  ApplicantPool pool;
  DiversitySpec diversity;
  PerformanceSpec performance;
  SelectionConstraints constraints;
};

Inputs load_inputs(const RunConfig& cfg) {
  const auto spec_doc = read_json_file(cfg.spec_path);
  Inputs in;
  in.performance = performance_spec_from_json(spec_doc);
  PoolFormat format;
  format.score_column = in.performance.score_field;
  in.pool = load_pool_file(cfg.pool_path, format);
  in.diversity = diversity_spec_from_json(spec_doc);
  in.diversity.validate(in.pool);
  if (!cfg.constraints_path.empty()) {
    in.constraints = constraints_from_json(read_json_file(cfg.constraints_path), cfg.k);
  }
  in.constraints.cohort_size = cfg.k;
  return in;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void write_frontier(const std::string& path, const Frontier& frontier) {
  if (ends_with(path, ".json")) {
    write_text_file(path, frontier_document(frontier));
  } else {
    std::ostringstream out;
    write_frontier_csv(out, frontier);
    write_text_file(path, out.str());
  }
}

std::vector<std::string> read_cohort_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::string> ids;
  for (std::string line; std::getline(in, line);) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream tokens(line);
    for (std::string id; tokens >> id;) ids.push_back(id);
  }
  return ids;
}

void print_summary(std::ostream& out, const Frontier& f) {
  out << "points: " << f.points.size() << '\n';
  if (f.points.empty()) return;
  out << "performance: [" << format_double(f.points.front().performance) << ", "
      << format_double(f.points.back().performance) << "]\n";
  out << "diversity: [" << format_double(f.points.back().diversity) << ", "
      << format_double(f.points.front().diversity) << "]\n";
}

void add_common(CLI::App* cmd, RunConfig& cfg, bool needs_out) {
  cmd->add_option("--pool", cfg.pool_path, "Applicant table (id, score, attribute columns)")->required();
  cmd->add_option("--spec", cfg.spec_path, "Diversity spec document")->required();
  cmd->add_option("--k", cfg.k, "Cohort size")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--steps", cfg.steps, "Scalarization steps")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--constraints", cfg.constraints_path, "Pinned/excluded document");
  auto* out = cmd->add_option("--out", cfg.out_path, "Output file");
  if (needs_out) out->required();
  cmd->add_option("--plot", cfg.plot_path, "SVG plot output");
  cmd->add_option("--threads", cfg.threads, "Worker threads, 0 = auto")->check(CLI::NonNegativeNumber);
}

void apply_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int cmd_frontier(const RunConfig& cfg, std::ostream& out) {
  apply_threads(cfg.threads);
  const auto in = load_inputs(cfg);
  const Problem problem(in.pool, in.diversity, in.performance, in.constraints);
  const auto frontier = build_frontier(problem, ScalarizationGrid{cfg.steps});
  write_frontier(cfg.out_path, frontier);
  if (!cfg.plot_path.empty()) write_text_file(cfg.plot_path, render_frontier_svg(frontier));
  print_summary(out, frontier);
  return kExitOk;
}

int cmd_gap(const RunConfig& cfg, const std::string& actual_path, const std::string& frontier_out,
            std::ostream& out) {
  apply_threads(cfg.threads);
  const auto in = load_inputs(cfg);
  const auto actual = read_cohort_file(actual_path);
  const Problem problem(in.pool, in.diversity, in.performance, in.constraints);
  const auto frontier = build_frontier(problem, ScalarizationGrid{cfg.steps});
  const auto report = pareto_gap(frontier, in.pool, in.diversity, in.performance, cfg.k, actual);
  const auto doc = gap_report_to_json(report).dump(2) + "\n";
  if (!cfg.out_path.empty()) write_text_file(cfg.out_path, doc);
  if (!frontier_out.empty()) write_frontier(frontier_out, frontier);
  if (!cfg.plot_path.empty()) {
    write_text_file(cfg.plot_path, render_frontier_svg(frontier, PlotOptions{"Selection possibility frontier", report}));
  }
  out << doc;
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::uint64_t budget, std::ostream& out) {
  apply_threads(cfg.threads);
  const auto in = load_inputs(cfg);
  const Problem problem(in.pool, in.diversity, in.performance, in.constraints);
  const double bound = 1.0 - std::exp(-1.0);
  double worst = 1.0;
  std::uint64_t enumerated = 0;
  out << std::setprecision(6) << std::fixed;
  for (double alpha : ScalarizationGrid{cfg.steps}.alphas()) {
    const auto greedy = lazy_greedy_cohort(problem, alpha);
    const auto exact = exact_opt(problem, alpha, budget);
    enumerated = exact.enumerated;
    const double ratio = exact.opt_objective > 0.0 ? greedy.trace.final_objective / exact.opt_objective : 1.0;
    worst = std::min(worst, ratio);
    out << "alpha " << alpha << "  greedy " << greedy.trace.final_objective << "  optimum " << exact.opt_objective
        << "  ratio " << ratio << '\n';
  }
  out << "cohorts enumerated per alpha: " << enumerated << '\n';
  out << "worst ratio: " << worst << " (bound " << bound << ")\n";
  if (worst < bound) {
    out << "verification FAILED\n";
    return kExitVerification;
  }
  out << "verification passed\n";
  return kExitOk;
}

int cmd_synth(std::size_t n, std::uint64_t seed, const std::vector<std::string>& splits, double missing_rate,
              const std::string& out_path, const std::string& spec_out, std::ostream& out) {
  SynthConfig config;
  config.n = n;
  config.seed = seed;
  config.missing_rate = missing_rate;
  for (const auto& split : splits) {
    const auto eq = split.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::kInvalidConfig, "--split expects attribute=category:share,..., got '" + split + "'");
    }
    const auto name = split.substr(0, eq);
    auto shares = parse_shares(split.substr(eq + 1));
    auto it = std::find_if(config.attributes.begin(), config.attributes.end(),
                           [&](const auto& a) { return a.name == name; });
    if (it == config.attributes.end()) {
      config.attributes.push_back({name, std::move(shares)});
    } else {
      it->shares = std::move(shares);
    }
  }
  const auto pool = synthesize_pool(config);
  std::ostringstream text;
  write_pool(text, pool);
  write_text_file(out_path, text.str());
  if (!spec_out.empty()) write_text_file(spec_out, diversity_spec_to_json(default_synthetic_spec()).dump(2) + "\n");
  out << "wrote " << pool.size() << " applicants to " << out_path << '\n';
  return kExitOk;
}

int cmd_serve(const std::string& host, int port, int threads, ServiceOptions options, std::ostream& out) {
  apply_threads(threads);
  Service service(std::move(options));
  httplib::Server server;
  service.mount(server);
  out << "listening on http://" << host << ':' << port << std::endl;
  if (!server.listen(host, port)) throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
  return kExitOk;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Selection possibility frontier toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto* frontier = app.add_subcommand("frontier", "Approximate the frontier with the greedy optimizer");
  add_common(frontier, cfg, true);

  std::string actual_path, frontier_out;
  auto* gap = app.add_subcommand("gap", "Compare an actual cohort against the frontier");
  add_common(gap, cfg, false);
  gap->add_option("--actual", actual_path, "File of cohort ids")->required();
  gap->add_option("--frontier-out", frontier_out, "Also write the frontier");

  std::uint64_t budget = kDefaultEnumerationBudget;
  auto* verify = app.add_subcommand("verify", "Check greedy against exhaustive enumeration");
  add_common(verify, cfg, false);
  verify->add_option("--budget", budget, "Maximum cohorts to enumerate per alpha")->capture_default_str();

  std::size_t n = 200;
  std::vector<std::string> splits;
  double missing_rate = 0.0;
  std::string spec_out;
  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic applicant pool");
  synth->add_option("--n", n, "Number of applicants")->capture_default_str();
  synth->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  synth->add_option("--split", splits, "attribute=category:share,... (repeatable)");
  synth->add_option("--missing-rate", missing_rate, "Share of attribute cells left empty");
  synth->add_option("--out", cfg.out_path, "Output table")->required();
  synth->add_option("--spec-out", spec_out, "Also write a matching diversity spec");

  std::string host = "127.0.0.1";
  int port = 8080;
  ServiceOptions service_options;
  std::string snapshot_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--threads", cfg.threads, "Worker threads per computation, 0 = auto");
  serve->add_option("--workers", service_options.workers, "Background job workers")->capture_default_str();
  serve->add_option("--job-threshold", service_options.job_threshold,
                    "Work estimate n*k*(steps+1) above which requests become jobs")
      ->capture_default_str();
  serve->add_option("--snapshot-dir", snapshot_dir, "Persist sessions to this directory");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*frontier) return cmd_frontier(cfg, out);
    if (*gap) return cmd_gap(cfg, actual_path, frontier_out, out);
    if (*verify) return cmd_verify(cfg, budget, out);
    if (*synth) return cmd_synth(n, cfg.seed, splits, missing_rate, cfg.out_path, spec_out, out);
    if (*serve) {
      if (!snapshot_dir.empty()) service_options.snapshot_dir = snapshot_dir;
      return cmd_serve(host, port, cfg.threads, service_options, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.category() << ": " << e.what() << '\n';
    return e.code() == ErrorCode::kInvalidConfig ? kExitUsage : kExitData;
  }
  return kExitUsage;
}

}  // namespace spf
