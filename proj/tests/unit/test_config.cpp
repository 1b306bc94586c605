#include <gtest/gtest.h>

#include "grapeclose/config.hpp"
#include "grapeclose/error.hpp"

using namespace grapeclose;

TEST(RunConfig, Defaults) {
  const RunConfig c;
  EXPECT_EQ(c.tau, 0.05);
  EXPECT_EQ(c.top_k, 1024);
  EXPECT_EQ(c.upsample_factor, 8);
  EXPECT_EQ(c.iqr_multiplier, 1.5);
  EXPECT_EQ(c.percentile_method, PercentileMethod::kLinear);
  EXPECT_EQ(c.closure_mode, ClosureMode::kClipped);
  EXPECT_EQ(c.fraction_p, 0.95);
  EXPECT_EQ(c.max_detections, 0);
}

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c;
  c.tau = 0.2;
  c.top_k = 7;
  c.closure_mode = ClosureMode::kLiteral;
  c.iqr_scope = IqrScope::kCluster;
  c.aggregation = Aggregation::kPooled;
  c.fit_input = FitInput::kMeans;
  const auto back = RunConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(back.iqr_options().multiplier, 1.5);
}

TEST(RunConfig, PartialOverridesBase) {
  RunConfig base;
  base.top_k = 3;
  const auto c = RunConfig::from_json(R"({"tau": 0.1})", base);
  EXPECT_EQ(c.tau, 0.1);
  EXPECT_EQ(c.top_k, 3);
}

TEST(RunConfig, Rejections) {
  EXPECT_THROW(RunConfig::from_json("{"), FormatError);
  EXPECT_THROW(RunConfig::from_json("[]"), FormatError);
  EXPECT_THROW(RunConfig::from_json(R"({"taus": 1})"), FormatError);
  EXPECT_THROW(RunConfig::from_json(R"({"tau": "x"})"), FormatError);
  EXPECT_THROW(RunConfig::from_json(R"({"tau": 1.0})"), ArgumentError);
  EXPECT_THROW(RunConfig::from_json(R"({"top_k": 0})"), ArgumentError);
  EXPECT_THROW(RunConfig::from_json(R"({"fraction_p": 1})"), ArgumentError);
  EXPECT_THROW(RunConfig::from_json(R"({"closure_mode": "raw"})"), ArgumentError);
}
