// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "spf/cli.hpp"
#include "spf/frontier.hpp"
#include "spf/greedy.hpp"
#include "spf/oracle.hpp"
#include "spf/serialize.hpp"
#include "support/exact_eval.hpp"
#include "support/instances.hpp"

using namespace spf;
namespace fs = std::filesystem;

namespace {

// Greedy must reach this fraction of the optimum, compared as doubles.
const double kRatioBound = 1.0 - std::exp(-1.0);
constexpr int kRatioInstances = 240;
constexpr std::size_t kRatioSteps = 10;
constexpr int kPropertyTriples = 20000;
// Exact-rational evaluation may differ from the double scorer by rounding.
constexpr double kOracleAgreement = 1e-12;
constexpr std::size_t kEq5MaxK = 8;
constexpr std::size_t kEq5MaxN = 12;
constexpr int kOracleInstances = 120;
constexpr double kWorkflowSeconds = 10.0;
constexpr int kLazyInstances = 100;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  char timing[32];
  std::snprintf(timing, sizeof timing, "%.2fs", secs);
  std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << timing << "): " << o.detail << std::endl;
}

DiversitySpec spec_with_coverage(testkit::Rng& rng, const ApplicantPool& pool) {
  auto spec = testkit::random_spec(rng, pool);
  if (spec.coverage.empty()) spec.coverage.push_back({"country", 1 + testkit::uniform_index(rng, 5), 1.0});
  return spec;
}

Outcome approximation_ratio() {
  testkit::Rng rng(2024);
  double worst = 1.0;
  std::size_t checks = 0, violations = 0;
  for (int trial = 0; trial < kRatioInstances; ++trial) {
    const std::size_t n = 8 + testkit::uniform_index(rng, 8);
    const std::size_t k = 2 + testkit::uniform_index(rng, 4);
    const auto pool = testkit::random_pool(rng, n);
    const Problem problem(pool, spec_with_coverage(rng, pool), {}, {k, {}, {}});
    for (double alpha : ScalarizationGrid{kRatioSteps}.alphas()) {
      const double greedy = greedy_cohort(problem, alpha).trace.final_objective;
      const double opt = exact_opt(problem, alpha).opt_objective;
      ++checks;
      if (!(greedy >= kRatioBound * opt)) ++violations;
      if (opt > 0.0) worst = std::min(worst, greedy / opt);
    }
  }
  std::ostringstream d;
  d << kRatioInstances << " instances, " << checks << " (instance, alpha) pairs, " << violations
    << " below bound, worst ratio " << worst << " vs bound " << kRatioBound;
  return {violations == 0, d.str()};
}

Outcome submodularity_monotonicity() {
  testkit::Rng rng(77);
  std::size_t api_violations = 0, exact_violations = 0, disagreements = 0, composed = 0;
  for (int trial = 0; trial < kPropertyTriples; ++trial) {
    const std::size_t n = 4 + testkit::uniform_index(rng, 20);
    const auto pool = testkit::random_pool(rng, n);
    auto spec = testkit::random_spec(rng, pool);
    if (testkit::coin(rng, 0.5)) {
      // Composite of two independent specs; drop proportional targets of the
      // second spec that would overlap the first.
      auto other = testkit::random_spec(rng, pool);
      std::erase_if(other.proportional, [&](const ProportionalTarget& t) {
        return std::any_of(spec.proportional.begin(), spec.proportional.end(),
                           [&](const ProportionalTarget& s) { return s.attribute == t.attribute; });
      });
      spec = combine(spec, other);
      ++composed;
    }
    const std::size_t k = 1 + testkit::uniform_index(rng, n);
    const double alpha = static_cast<double>(testkit::uniform_index(rng, 21)) / 20.0;

    const auto y_plus = testkit::random_subset(rng, n, 1 + testkit::uniform_index(rng, n));
    const std::size_t x = y_plus[testkit::uniform_index(rng, y_plus.size())];
    std::vector<std::size_t> y, sub;
    for (auto i : y_plus)
      if (i != x) y.push_back(i);
    for (auto i : y)
      if (testkit::coin(rng, 0.5)) sub.push_back(i);

    const DiversityScorer div(spec, pool, k);
    const PerformanceScorer perf({}, pool, k);
    const auto sx = div.state_of(sub), sy = div.state_of(y);

    // Scorer API, compared exactly.
    const double dgx = div.gain(sx, x), dgy = div.gain(sy, x);
    const double pgx = perf.gain(x), pgy = perf.gain(x);
    const double fgx = blend(alpha, pgx, dgx), fgy = blend(alpha, pgy, dgy);
    const double dX = div.value(sx), dY = div.value(sy);
    const double pX = perf.evaluate(sub), pY = perf.evaluate(y);
    bool ok = dgx >= dgy && pgx >= pgy && fgx >= fgy && dX <= dY && pX <= pY &&
              blend(alpha, pX, dX) <= blend(alpha, pY, dY) && dgx >= 0.0 && dgy >= 0.0;
    if (!ok) ++api_violations;

    // Independent exact evaluation of the same triple.
    const testkit::ExactEvaluator oracle{pool, spec, k};
    auto with = [&](std::vector<std::size_t> c) {
      c.push_back(x);
      return c;
    };
    const auto a = testkit::exact(alpha);
    const auto eDx = oracle.diversity(with(sub)) - oracle.diversity(sub);
    const auto eDy = oracle.diversity(with(y)) - oracle.diversity(y);
    const auto ePx = oracle.performance(with(sub)) - oracle.performance(sub);
    const auto ePy = oracle.performance(with(y)) - oracle.performance(y);
    const auto eFx = oracle.blended(a, with(sub)) - oracle.blended(a, sub);
    const auto eFy = oracle.blended(a, with(y)) - oracle.blended(a, y);
    ok = eDx >= eDy && ePx == ePy && eFx >= eFy && oracle.diversity(sub) <= oracle.diversity(y) &&
         oracle.performance(sub) <= oracle.performance(y) && eDy >= 0 && ePy >= 0;
    if (!ok) ++exact_violations;

    if (std::abs(dgx - eDx.convert_to<double>()) > kOracleAgreement ||
        std::abs(dgy - eDy.convert_to<double>()) > kOracleAgreement ||
        std::abs(dY - oracle.diversity(y).convert_to<double>()) > kOracleAgreement ||
        std::abs(pY - oracle.performance(y).convert_to<double>()) > kOracleAgreement) {
      ++disagreements;
    }
  }
  std::ostringstream d;
  d << kPropertyTriples << " triples (" << composed << " on composed specs); violations: scorer " << api_violations
    << ", exact " << exact_violations << "; scorer/oracle disagreements " << disagreements;
  return {api_violations == 0 && exact_violations == 0 && disagreements == 0, d.str()};
}

Outcome eq5_equivalence() {
  std::size_t cohorts = 0, mismatches = 0;
  double literal_gap = 0.0;
  const DiversitySpec spec{{{"gender", {"female", "non_binary"}, 0.5, 1.0}}, {}};
  for (std::size_t n = 1; n <= kEq5MaxN; ++n) {
    for (std::size_t non_male = 0; non_male <= n; ++non_male) {
      std::vector<Applicant> applicants;
      for (std::size_t i = 0; i < n; ++i) {
        // Spread the non-male applicants across the rows.
        const bool nm = (i * non_male) / n != ((i + 1) * non_male) / n;
        const std::string g = nm ? (i % 2 ? "female" : "non_binary") : "male";
        char id[8];
        std::snprintf(id, sizeof id, "p%02zu", i);
        applicants.push_back({id, 0.5, {{"gender", g}}});
      }
      const ApplicantPool pool({"gender"}, applicants);
      for (std::size_t k = 1; k <= std::min(kEq5MaxK, n); ++k) {
        const DiversityScorer scorer(spec, pool, k);
        std::vector<std::size_t> combo(k);
        std::iota(combo.begin(), combo.end(), 0);
        do {
          std::size_t nm = 0;
          for (auto i : combo) nm += pool[i].attributes.at("gender") != "male";
          const std::size_t m = k - nm;
          // 1 - max(m/k - nm/k, 0) with the subtraction done on integers.
          const double algebraic =
              static_cast<double>(k - (m > nm ? m - nm : 0)) / static_cast<double>(k);
          const double literal = 1.0 - std::max(static_cast<double>(m) / k - static_cast<double>(nm) / k, 0.0);
          const double got = scorer.evaluate(combo);
          ++cohorts;
          if (got != algebraic) ++mismatches;
          literal_gap = std::max(literal_gap, std::abs(got - literal));
        } while (next_combination(combo, n));
      }
    }
  }
  std::ostringstream d;
  d << cohorts << " full cohorts (n <= " << kEq5MaxN << ", k <= " << kEq5MaxK << "), " << mismatches
    << " mismatches; max deviation from the floating-point literal form " << literal_gap;
  return {mismatches == 0, d.str()};
}

Outcome oracle_consistency() {
  testkit::Rng rng(99);
  std::size_t greedy_points = 0, undominated = 0, filter_mismatch = 0;
  for (int trial = 0; trial < kOracleInstances; ++trial) {
    const std::size_t n = 6 + testkit::uniform_index(rng, 9);
    const std::size_t k = 2 + testkit::uniform_index(rng, 4);
    const auto pool = testkit::random_pool(rng, n);
    const Problem problem(pool, spec_with_coverage(rng, pool), {}, {k, {}, {}});
    const auto exact = exact_frontier(problem);

    for (const auto& g : build_frontier(problem, {10}).points) {
      ++greedy_points;
      const bool covered = std::any_of(exact.points.begin(), exact.points.end(), [&](const FrontierPoint& e) {
        return e.performance >= g.performance && e.diversity >= g.diversity;
      });
      if (!covered) ++undominated;
    }

    std::vector<FrontierPoint> all;
    std::vector<std::size_t> combo(k);
    std::iota(combo.begin(), combo.end(), 0);
    do {
      const auto o = problem.evaluate(combo);
      all.push_back({std::nullopt, o.performance, o.diversity, problem.ids(combo)});
    } while (next_combination(combo, n));
    auto filtered = pareto_filter(all);
    std::stable_sort(filtered.begin(), filtered.end(),
                     [](const FrontierPoint& a, const FrontierPoint& b) { return a.performance < b.performance; });
    if (filtered != exact.points) ++filter_mismatch;
  }
  std::ostringstream d;
  d << kOracleInstances << " instances, " << greedy_points << " greedy points, " << undominated
    << " not weakly dominated by the exact frontier; " << filter_mismatch << " pareto_filter mismatches";
  return {undominated == 0 && filter_mismatch == 0, d.str()};
}

struct Workspace {
  fs::path dir;
  Workspace() : dir(fs::temp_directory_path() / ("spf_acceptance_" + std::to_string(::getpid()))) {
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = run_cli(std::move(args), o, e);
  if (out) *out = o.str() + e.str();
  return code;
}

Outcome case_study_workflow() {
  Workspace ws;
  const auto start = std::chrono::steady_clock::now();
  std::string log;
  if (cli({"synth", "--n", "200", "--seed", "42", "--out", ws / "pool.csv", "--spec-out", ws / "spec.json"}, &log))
    return {false, "synth failed: " + log};
  const std::vector<std::string> common{"--pool", ws / "pool.csv", "--spec", ws / "spec.json", "--k", "20", "--steps", "20"};
  auto with = [&](std::vector<std::string> head, std::vector<std::string> tail) {
    head.insert(head.end(), common.begin(), common.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  };
  if (cli(with({"frontier"}, {"--out", ws / "frontier.json"}), &log)) return {false, "frontier failed: " + log};
  const auto frontier = frontier_from_json(read_json_file(ws / "frontier.json"));

  testkit::Rng rng(7);
  std::string planted;
  for (auto i : testkit::random_subset(rng, 200, 20)) {
    char id[8];
    std::snprintf(id, sizeof id, "A%04zu", i + 1);
    planted += std::string(id) + "\n";
  }
  write_text_file(ws / "planted.txt", planted);
  if (cli(with({"gap"}, {"--actual", ws / "planted.txt", "--out", ws / "gap.json", "--plot", ws / "gap.svg"}), &log))
    return {false, "gap failed: " + log};
  const auto gap = read_json_file(ws / "gap.json");
  const double dg = gap["diversity_gain_abs"], pg = gap["performance_gain_abs"];

  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < frontier.points.size(); ++i) {
    std::string ids;
    for (const auto& id : frontier.points[i].cohort) ids += id + "\n";
    write_text_file(ws / "point.txt", ids);
    if (cli(with({"gap"}, {"--actual", ws / "point.txt", "--out", ws / "point.json"}), &log))
      return {false, "gap on frontier cohort failed: " + log};
    const auto r = read_json_file(ws / "point.json");
    if (r["diversity_gain_abs"].get<double>() != 0.0 || r["performance_gain_abs"].get<double>() != 0.0) ++nonzero;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream d;
  d << "planted cohort gains: diversity " << dg << " (" << gap["diversity_gain_rel"].dump() << " rel), performance "
    << pg << " (" << gap["performance_gain_rel"].dump() << " rel); " << frontier.points.size()
    << " frontier cohorts, " << nonzero << " with nonzero gain; " << secs << "s";
  return {dg > 0.0 && pg > 0.0 && nonzero == 0 && secs < kWorkflowSeconds, d.str()};
}

Outcome determinism() {
  Workspace ws;
  cli({"synth", "--n", "200", "--seed", "42", "--out", ws / "pool.csv", "--spec-out", ws / "spec.json"});
  write_text_file(ws / "actual.txt", "A0001 A0002 A0003 A0004 A0005 A0006 A0007 A0008 A0009 A0010\n");
  std::vector<std::string> outputs;
  std::size_t runs = 0;
  for (const char* threads : {"1", "4", "0", "1"}) {
    const std::string tag = std::to_string(runs++);
    const std::vector<std::string> common{"--pool", ws / "pool.csv", "--spec", ws / "spec.json", "--k", "10",
                                          "--threads", threads};
    auto args = std::vector<std::string>{"frontier"};
    args.insert(args.end(), common.begin(), common.end());
    auto json_args = args, csv_args = args;
    json_args.insert(json_args.end(), {"--out", ws / ("f" + tag + ".json"), "--plot", ws / ("f" + tag + ".svg")});
    csv_args.insert(csv_args.end(), {"--out", ws / ("f" + tag + ".csv")});
    auto gap_args = std::vector<std::string>{"gap"};
    gap_args.insert(gap_args.end(), common.begin(), common.end());
    gap_args.insert(gap_args.end(), {"--actual", ws / "actual.txt", "--out", ws / ("g" + tag + ".json"), "--plot",
                                     ws / ("g" + tag + ".svg")});
    if (cli(json_args) || cli(csv_args) || cli(gap_args)) return {false, "command failed"};
    outputs.push_back(read_text_file(ws / ("f" + tag + ".json")) + read_text_file(ws / ("f" + tag + ".svg")) +
                      read_text_file(ws / ("f" + tag + ".csv")) + read_text_file(ws / ("g" + tag + ".json")) +
                      read_text_file(ws / ("g" + tag + ".svg")));
  }
  const bool same = std::adjacent_find(outputs.begin(), outputs.end(), std::not_equal_to<>()) == outputs.end();
  std::ostringstream d;
  d << runs << " runs (threads 1, 4, auto, 1) of frontier json+svg, csv and gap json+svg: "
    << (same ? "byte-identical" : "outputs differ");
  return {same, d.str()};
}

Outcome lazy_equivalence() {
  testkit::Rng rng(123);
  std::size_t mismatches = 0, large_runs = 0, not_fewer = 0;
  std::uint64_t lazy_total = 0, naive_total = 0;
  for (int trial = 0; trial < kLazyInstances; ++trial) {
    const std::size_t n = 10 + testkit::uniform_index(rng, 291);
    const std::size_t k = 2 + testkit::uniform_index(rng, std::min<std::size_t>(n / 2, 30));
    const auto pool = testkit::random_pool(rng, n);
    SelectionConstraints c{k, {}, {}};
    if (testkit::coin(rng, 0.3)) c.pinned.insert(pool[testkit::uniform_index(rng, n)].id);
    const Problem problem(pool, testkit::random_spec(rng, pool), {}, c);
    for (double alpha : ScalarizationGrid{10}.alphas()) {
      const auto naive = greedy_cohort(problem, alpha);
      const auto lazy = lazy_greedy_cohort(problem, alpha);
      if (lazy.cohort != naive.cohort || !(lazy.trace == naive.trace)) ++mismatches;
      if (n >= 100) {
        ++large_runs;
        lazy_total += lazy.gain_evaluations;
        naive_total += naive.gain_evaluations;
        if (lazy.gain_evaluations >= naive.gain_evaluations) ++not_fewer;
      }
    }
  }
  std::ostringstream d;
  d << kLazyInstances << " instances x 11 alphas, " << mismatches << " cohort/trace mismatches; on " << large_runs
    << " runs with n >= 100 lazy used " << lazy_total << " gain evaluations vs " << naive_total << " naive, "
    << not_fewer << " runs without a saving";
  return {mismatches == 0 && not_fewer == 0, d.str()};
}

}  // namespace

int main() {
  std::cout.precision(6);
  report("approximation_ratio", approximation_ratio);
  report("submodularity_monotonicity", submodularity_monotonicity);
  report("proportional_parity_algebraic_form", eq5_equivalence);
  report("oracle_frontier_consistency", oracle_consistency);
  report("gap_workflow_synthetic", case_study_workflow);
  report("determinism", determinism);
  report("lazy_naive_equivalence", lazy_equivalence);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
