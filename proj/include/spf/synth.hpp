#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spf/diversity.hpp"
#include "spf/pool.hpp"

namespace spf {

struct CategoricalAttribute {
  std::string name;
  std::vector<std::pair<std::string, double>> shares;  // unnormalized weights
};

struct SynthConfig {
  std::size_t n = 200;
  std::uint64_t seed = 42;
  std::vector<CategoricalAttribute> attributes = default_attributes();
  double missing_rate = 0.0;  // chance that an attribute cell is left empty
  double score_mean = 0.55;
  double score_spread = 0.12;
  // Additive score shift per (attribute, category). The defaults tilt scores
  // so that the most diverse and the best-scoring cohorts differ.
  std::map<std::string, std::map<std::string, double>> score_shift = default_score_shift();

  static std::vector<CategoricalAttribute> default_attributes();
  static std::map<std::string, std::map<std::string, double>> default_score_shift();
};

// Deterministic for a given config: the generator only uses raw
// mt19937_64 output, so files are identical across platforms. Scores are
// rounded to four decimals and clamped to [0, 1]. Throws kInvalidConfig.
ApplicantPool synthesize_pool(const SynthConfig& config);

// Targets matching the default attributes: gender parity (female and
// non_binary at 50%), 40% low socioeconomic status and coverage of eight
// countries.
DiversitySpec default_synthetic_spec();

// Parses "male:0.7,female:0.3".
std::vector<std::pair<std::string, double>> parse_shares(const std::string& text);

}  // namespace spf
