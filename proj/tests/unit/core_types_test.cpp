// Copyright 2026 The CSCA Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "csca/core_types.hpp"
#include "csca/error.hpp"

namespace csca {
namespace {

TEST(ContentLabel, RoundTripsEveryName) {
  for (ContentLabel label : kAllContentLabels) {
    EXPECT_EQ(parse_content_label(to_string(label)), label);
  }
  EXPECT_EQ(code(ContentLabel::kObject), 0);
  EXPECT_EQ(code(ContentLabel::kOther), 4);
}

TEST(ContentLabel, RejectsUnknownNames) {
  EXPECT_THROW(parse_content_label("dog"), ParseError);
  EXPECT_THROW(parse_content_label("Human"), ParseError);
  EXPECT_THROW(parse_content_label(""), ParseError);
}

TEST(CreativityLevel, PhrasesAndWeights) {
  const std::array<std::string_view, 5> phrases = {"bad", "poor", "fair", "good", "perfect"};
  const std::array<double, 5> weights = {0.2, 0.4, 0.6, 0.8, 1.0};
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(creativity_level(i).phrase, phrases[i]);
    EXPECT_EQ(creativity_level(i).weight, weights[i]);
  }
  EXPECT_THROW(creativity_level(5), DimensionError);
}

TEST(Split, ParsesAllNames) {
  for (auto s : {Split::kTrain, Split::kVal, Split::kTest, Split::kRg1, Split::kRg2, Split::kFg}) {
    EXPECT_EQ(parse_split(to_string(s)), s);
  }
  EXPECT_THROW(parse_split("holdout"), ParseError);
}

TEST(RunConfig, DefaultsMatchPublishedSettings) {
  const RunConfig c;
  EXPECT_EQ(c.batch_size, 16);
  EXPECT_EQ(c.learning_rate, 1e-5);
  EXPECT_EQ(c.max_epochs, 136);
  EXPECT_EQ(c.lambda_cls, 1e-3);
  EXPECT_EQ(c.temperature, 0.01);
  EXPECT_EQ(c.early_stop_patience, 10);
  EXPECT_TRUE(c.ablation.use_lcr && c.ablation.use_sct && c.ablation.use_cct);
  EXPECT_NO_THROW(c.validate());
}

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c;
  c.seed = 42;
  c.ablation = {true, false, true};
  c.learning_rate = 3.25e-4;
  c.weights_path = "/tmp/w.bin";
  EXPECT_EQ(RunConfig::from_json(c.to_json()), c);
}

TEST(RunConfig, MissingFieldNamesFieldAndDefault) {
  nlohmann::json j = RunConfig{}.to_json();
  j.erase("lambda_cls");
  try {
    RunConfig::from_json(j);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("lambda_cls"), std::string::npos) << msg;
    EXPECT_NE(msg.find("0.001"), std::string::npos) << msg;
  }
}

TEST(RunConfig, RejectsUnknownFieldsAndBadValues) {
  nlohmann::json j = RunConfig{}.to_json();
  j["lamda_cls"] = 0.1;
  EXPECT_THROW(RunConfig::from_json(j), ConfigError);

  j = RunConfig{}.to_json();
  j["batch_size"] = 0;
  EXPECT_THROW(RunConfig::from_json(j), ConfigError);

  j = RunConfig{}.to_json();
  j["temperature"] = "hot";
  EXPECT_THROW(RunConfig::from_json(j), ConfigError);

  j = RunConfig{}.to_json();
  j["backbone"] = "resnet";
  EXPECT_THROW(RunConfig::from_json(j), ConfigError);
}

TEST(RunConfig, MergeKeepsBaseForAbsentFields) {
  RunConfig base;
  base.seed = 9;
  const RunConfig merged = RunConfig::merge_json(base, {{"max_epochs", 3}});
  EXPECT_EQ(merged.seed, 9u);
  EXPECT_EQ(merged.max_epochs, 3);
}

TEST(RunConfig, FingerprintIsStableAndSensitive) {
  RunConfig a;
  RunConfig b;
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_EQ(a.fingerprint().size(), 16u);
  b.seed = 1;
  EXPECT_NE(a.fingerprint(), b.fingerprint());
  RunConfig c;
  c.weights_path = "elsewhere.bin";
  EXPECT_EQ(a.fingerprint(), c.fingerprint());
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(to_hex(0xabcULL), "0000000000000abc");
}

}  // namespace
}  // namespace csca
