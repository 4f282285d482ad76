#include "spf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "spf/error.hpp"

namespace spf {

std::vector<CategoricalAttribute> SynthConfig::default_attributes() {
  std::vector<std::pair<std::string, double>> countries;
  // Roughly Zipf-shaped shares over ten countries.
  for (int c = 1; c <= 10; ++c) {
    char name[8];
    std::snprintf(name, sizeof(name), "C%02d", c);
    countries.emplace_back(name, 1.0 / c);
  }
  return {
      {"gender", {{"male", 0.62}, {"female", 0.33}, {"non_binary", 0.05}}},
      {"country", std::move(countries)},
      {"ses", {{"low", 0.25}, {"mid", 0.5}, {"high", 0.25}}},
  };
}

std::map<std::string, std::map<std::string, double>> SynthConfig::default_score_shift() {
  return {
      {"gender", {{"male", 0.04}}},
      {"ses", {{"low", -0.06}, {"high", 0.06}}},
      {"country", {{"C01", 0.03}, {"C02", 0.02}}},
  };
}

namespace {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t categorical(const std::vector<double>& cumulative) {
    const double u = uniform() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
  }

  // Irwin-Hall with four terms: mean 0, unit variance.
  double standard_bell() {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += uniform();
    return (s - 2.0) * std::sqrt(3.0);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

ApplicantPool synthesize_pool(const SynthConfig& config) {
  if (config.n == 0) throw Error(ErrorCode::kInvalidConfig, "synthetic pool size must be positive");
  if (!(config.missing_rate >= 0.0 && config.missing_rate < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "missing rate must lie in [0,1)");
  }
  std::vector<std::vector<double>> cumulative;
  std::vector<std::string> names;
  for (const auto& attr : config.attributes) {
    if (attr.shares.empty()) throw Error(ErrorCode::kInvalidConfig, "attribute '" + attr.name + "' has no categories");
    std::vector<double> cum;
    double total = 0.0;
    for (const auto& [cat, share] : attr.shares) {
      if (!(share >= 0.0) || cat.empty()) {
        throw Error(ErrorCode::kInvalidConfig, "bad category share in attribute '" + attr.name + "'");
      }
      total += share;
      cum.push_back(total);
    }
    if (!(total > 0.0)) throw Error(ErrorCode::kInvalidConfig, "shares of '" + attr.name + "' sum to zero");
    cumulative.push_back(std::move(cum));
    names.push_back(attr.name);
  }

  const int width = std::max(4, static_cast<int>(std::to_string(config.n).size()));
  Sampler rng(config.seed);
  std::vector<Applicant> applicants;
  applicants.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    Applicant a;
    char id[32];
    std::snprintf(id, sizeof(id), "A%0*zu", width, i + 1);
    a.id = id;
    double shift = 0.0;
    for (std::size_t c = 0; c < config.attributes.size(); ++c) {
      const auto& attr = config.attributes[c];
      const auto& category = attr.shares[rng.categorical(cumulative[c])].first;
      const bool missing = config.missing_rate > 0.0 && rng.uniform() < config.missing_rate;
      a.attributes[attr.name] = missing ? std::string() : category;
      if (auto s = config.score_shift.find(attr.name); s != config.score_shift.end()) {
        if (auto v = s->second.find(category); v != s->second.end()) shift += v->second;
      }
    }
    const double raw = config.score_mean + shift + config.score_spread * rng.standard_bell();
    a.score = std::clamp(std::round(raw * 1e4) / 1e4, 0.0, 1.0);
    applicants.push_back(std::move(a));
  }
  return ApplicantPool(std::move(names), std::move(applicants));
}

DiversitySpec default_synthetic_spec() {
  DiversitySpec spec;
  spec.proportional.push_back({"gender", {"female", "non_binary"}, 0.5, 1.0});
  spec.proportional.push_back({"ses", {"low"}, 0.4, 1.0});
  spec.coverage.push_back({"country", 8, 1.0});
  return spec;
}

std::vector<std::pair<std::string, double>> parse_shares(const std::string& text) {
  std::vector<std::pair<std::string, double>> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto colon = item.rfind(':');
    if (colon == std::string::npos || colon == 0) {
      throw Error(ErrorCode::kInvalidConfig, "expected category:share, got '" + item + "'");
    }
    double share = 0.0;
    try {
      std::size_t used = 0;
      share = std::stod(item.substr(colon + 1), &used);
      if (used != item.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidConfig, "bad share in '" + item + "'");
    }
    out.emplace_back(item.substr(0, colon), share);
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidConfig, "no category shares given");
  return out;
}

}  // namespace spf
