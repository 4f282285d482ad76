#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "spf/error.hpp"
#include "spf/synth.hpp"

using namespace spf;

namespace {

std::string text_of(const ApplicantPool& pool) {
  std::ostringstream out;
  write_pool(out, pool);
  return out.str();
}

std::map<std::string, std::size_t> tally(const ApplicantPool& pool, const std::string& attribute) {
  std::map<std::string, std::size_t> counts;
  for (const auto& a : pool.applicants()) ++counts[a.attributes.at(attribute)];
  return counts;
}

}  // namespace

TEST(Synth, SameSeedSameBytes) {
  SynthConfig config;
  EXPECT_EQ(text_of(synthesize_pool(config)), text_of(synthesize_pool(config)));
  SynthConfig other = config;
  other.seed = 43;
  EXPECT_NE(text_of(synthesize_pool(config)), text_of(synthesize_pool(other)));
}

TEST(Synth, ShapeAndRanges) {
  const auto pool = synthesize_pool({});
  ASSERT_EQ(pool.size(), 200u);
  EXPECT_EQ(pool[0].id, "A0001");
  EXPECT_EQ(pool.attribute_names(), (std::vector<std::string>{"gender", "country", "ses"}));
  for (const auto& a : pool.applicants()) {
    EXPECT_GE(a.score, 0.0);
    EXPECT_LE(a.score, 1.0);
  }
  EXPECT_NO_THROW(default_synthetic_spec().validate(pool));
}

// Pearson chi-square against the requested split; 10.83 is the 0.001
// critical value for one degree of freedom.
TEST(Synth, RequestedSplitWithinSamplingTolerance) {
  SynthConfig config;
  config.n = 2000;
  config.attributes[0] = {"gender", parse_shares("female:0.3,male:0.7")};
  const auto counts = tally(synthesize_pool(config), "gender");
  const double expected_f = 0.3 * 2000, expected_m = 0.7 * 2000;
  const double f = static_cast<double>(counts.at("female")), m = static_cast<double>(counts.at("male"));
  const double chi2 = (f - expected_f) * (f - expected_f) / expected_f + (m - expected_m) * (m - expected_m) / expected_m;
  EXPECT_LT(chi2, 10.83) << "female " << f << " male " << m;
}

TEST(Synth, MissingRateLeavesUnknownCells) {
  SynthConfig config;
  config.n = 1000;
  config.missing_rate = 0.2;
  const auto counts = tally(synthesize_pool(config), "ses");
  const double share = static_cast<double>(counts.at("unknown")) / 1000.0;
  EXPECT_NEAR(share, 0.2, 0.05);
}

TEST(Synth, InvalidConfig) {
  SynthConfig config;
  config.n = 0;
  try {
    synthesize_pool(config);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), "invalid_config");
  }
  EXPECT_THROW(parse_shares("female"), Error);
  EXPECT_THROW(parse_shares("female:x"), Error);
  EXPECT_THROW(parse_shares(""), Error);
  EXPECT_EQ(parse_shares("a:1,b:2.5").size(), 2u);
}
