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

#include <fstream>

#include "csca/backbone.hpp"
#include "csca/error.hpp"
#include "csca/tensor_io.hpp"
#include "test_util.hpp"

namespace csca {
namespace {

TEST(ToyBundle, IsDeterministicPerSeed) {
  const auto a = toy_bundle(16, 1);
  const auto b = toy_bundle(16, 1);
  const auto c = toy_bundle(16, 2);
  EXPECT_EQ(a->parameter_checksum(), b->parameter_checksum());
  EXPECT_NE(a->parameter_checksum(), c->parameter_checksum());
  EXPECT_EQ(a->embed_dim(), 16);
  EXPECT_EQ(a->token_dim(), 16);
  EXPECT_THROW(toy_bundle(4, 1), ConfigError);
}

TEST(ToyBundle, EncodersReturnUnitVectors) {
  const auto bundle = testing::small_bundle();
  std::mt19937_64 rng(1);
  const Vector img = bundle->encode_image(testing::random_tensor(rng, 30, 40, -1.0, 1.0));
  EXPECT_EQ(img.size(), 16);
  EXPECT_NEAR(img.norm(), 1.0, 1e-12);
  const Vector txt = bundle->encode_prompt("a photo of animal");
  EXPECT_NEAR(txt.norm(), 1.0, 1e-12);
}

TEST(ToyBundle, TokenizerIsCaseAndPunctuationInsensitive) {
  const auto bundle = testing::small_bundle();
  EXPECT_EQ(bundle->tokenize("The creativity, of the PHOTO"), bundle->tokenize("the creativity of the photo"));
  EXPECT_EQ(bundle->tokenize("a photo of plant").size(), 4u);
  EXPECT_TRUE(bundle->tokenize("  ,, ").empty());
}

TEST(ToyBundle, PoolingAveragesBlocks) {
  const auto bundle = testing::small_bundle();
  ImageTensor t(16, 16, 0.0);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 2; ++x) t.at(1, y, x) = 4.0;
  }
  const Vector pooled = bundle->pool_image(t);
  ASSERT_EQ(pooled.size(), 3 * 64);
  EXPECT_DOUBLE_EQ(pooled[64], 4.0);
  EXPECT_DOUBLE_EQ(pooled[65], 0.0);
  EXPECT_DOUBLE_EQ(pooled[0], 0.0);
}

TEST(ToyBundle, TextBackwardMatchesFiniteDifferences) {
  const auto bundle = testing::small_bundle();
  std::mt19937_64 rng(8);
  Matrix tokens = bundle->embed_tokens(bundle->tokenize("the creativity of the photo is fair"));
  const Vector g = testing::random_gaussian(rng, bundle->embed_dim());
  const Matrix analytic = bundle->encode_text_backward(tokens, g);
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < tokens.size(); i += 7) {
    Matrix plus = tokens, minus = tokens;
    plus.data()[i] += h;
    minus.data()[i] -= h;
    const double numeric = (g.dot(bundle->encode_text(plus)) - g.dot(bundle->encode_text(minus))) / (2 * h);
    EXPECT_LT(testing::relative_error(analytic.data()[i], numeric), 1e-6) << i;
  }
}

TEST(L2Normalize, RejectsZeroVector) {
  EXPECT_THROW(l2_normalize(Vector::Zero(3)), DegenerateInputError);
  Vector v(2);
  v << 3, 4;
  EXPECT_DOUBLE_EQ(l2_normalize(v)[0], 0.6);
}

TEST(PretrainedBundle, RoundTripsWeights) {
  testing::TempDir dir;
  const auto bundle = testing::small_bundle(12, 5);
  save_bundle_weights(*bundle, dir.file("w.bin"));
  const auto loaded = pretrained_bundle("toy", dir.file("w.bin"));
  EXPECT_EQ(loaded->parameter_checksum(), bundle->parameter_checksum());
  EXPECT_EQ(loaded->encode_prompt("a photo of human"), bundle->encode_prompt("a photo of human"));
  EXPECT_THROW(pretrained_bundle("toy", dir.file("w.bin"), 768), DimensionError);
}

TEST(PretrainedBundle, ValidatesIdentityAndFile) {
  testing::TempDir dir;
  save_bundle_weights(*testing::small_bundle(12, 5), dir.file("w.bin"));
  EXPECT_THROW(pretrained_bundle("vit-l-14", dir.file("w.bin")), ConfigError);
  PooledLinearBundle::Weights w = testing::small_bundle(12, 5)->weights();
  w.model_id = "vit-l-14";
  save_bundle_weights(PooledLinearBundle(w), dir.file("vit.bin"));
  EXPECT_THROW(pretrained_bundle("vit-l-14", dir.file("vit.bin")), DimensionError);
  EXPECT_THROW(pretrained_bundle("rn50", dir.file("w.bin")), ConfigError);
  EXPECT_THROW(pretrained_bundle("toy", dir.file("absent.bin")), ConfigError);
  std::ofstream(dir.file("junk.bin")) << "garbage";
  EXPECT_THROW(pretrained_bundle("toy", dir.file("junk.bin")), ConfigError);
}

TEST(TensorIo, RoundTripAndCorruption) {
  testing::TempDir dir;
  Matrix a(2, 3);
  a << 1, 2, 3, 4, 5, 6.5;
  Matrix b = Matrix::Constant(1, 1, -0.25);
  write_tensor_file(dir.file("t.bin"), "TESTMAGC", 2, {{"k", "v"}}, {{"a", a}, {"b", b}});
  const TensorFile f = read_tensor_file(dir.file("t.bin"), "TESTMAGC", 2);
  EXPECT_EQ(f.version, 2u);
  EXPECT_EQ(f.meta.at("k"), "v");
  EXPECT_EQ(f.tensor("a"), a);
  EXPECT_EQ(f.tensor("b"), b);
  EXPECT_THROW(f.tensor("c"), ParseError);
  EXPECT_THROW(read_tensor_file(dir.file("t.bin"), "OTHERMAG", 2), ParseError);
  EXPECT_THROW(read_tensor_file(dir.file("t.bin"), "TESTMAGC", 1), ParseError);

  const std::string bytes = testing::read_file(dir.file("t.bin"));
  std::ofstream(dir.file("short.bin"), std::ios::binary) << bytes.substr(0, bytes.size() - 4);
  EXPECT_THROW(read_tensor_file(dir.file("short.bin"), "TESTMAGC", 2), ParseError);
  std::ofstream(dir.file("long.bin"), std::ios::binary) << bytes << "x";
  EXPECT_THROW(read_tensor_file(dir.file("long.bin"), "TESTMAGC", 2), ParseError);
}

}  // namespace
}  // namespace csca
