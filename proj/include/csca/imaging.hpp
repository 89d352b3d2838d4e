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

#ifndef CSCA_IMAGING_HPP_
#define CSCA_IMAGING_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace csca {

inline constexpr int kModelInputSize = 224;

// 8-bit RGB, row-major, interleaved.
struct RawImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> rgb;

  std::uint8_t& at(int y, int x, int c) { return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  std::uint8_t at(int y, int x, int c) const {
    return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
};

// Three channels, planar (channel-major) layout.
struct ImageTensor {
  static constexpr int kChannels = 3;
  int height = 0;
  int width = 0;
  std::vector<double> values;

  ImageTensor() = default;
  ImageTensor(int h, int w, double fill = 0.0)
      : height(h), width(w), values(static_cast<std::size_t>(kChannels) * h * w, fill) {}

  std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
  double& at(int c, int y, int x) {
    return values[c * plane_size() + static_cast<std::size_t>(y) * width + x];
  }
  double at(int c, int y, int x) const {
    return values[c * plane_size() + static_cast<std::size_t>(y) * width + x];
  }
  std::span<const double> channel(int c) const {
    return {values.data() + c * plane_size(), plane_size()};
  }
};

struct ChannelStats {
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  std::array<double, 3> std{1.0, 1.0, 1.0};
};

inline constexpr double kStdFloor = 1e-6;

// PNG or JPEG, detected from the file signature. Grayscale and palette
// images are expanded to RGB; alpha is composited over white.
RawImage decode_image(const std::string& path);
void write_png(const std::string& path, const RawImage& image);

// v -> 1 - v/255 per channel, so ink is high and background low.
ImageTensor invert(const RawImage& image);
ImageTensor decode_and_invert(const std::string& path);

// Per-channel mean/std over every pixel of every image (population
// variance), std floored at kStdFloor.
ChannelStats compute_channel_stats(std::span<const ImageTensor> images);

// Streaming variant over inverted image files; images are decoded one at a
// time.
ChannelStats compute_channel_stats(std::span<const std::string> image_paths);

class ChannelStatsAccumulator {
 public:
  void add(const ImageTensor& image);
  std::size_t images() const { return images_; }
  ChannelStats finish() const;

 private:
  std::size_t images_ = 0;
  std::array<double, 3> count_{};
  std::array<double, 3> mean_{};
  std::array<double, 3> m2_{};
};

ImageTensor standardize(const ImageTensor& image, const ChannelStats& stats);

// Half-pixel-centre bilinear interpolation without antialiasing. Equal sizes
// return the input unchanged.
ImageTensor resize_bilinear(const ImageTensor& image, int out_height, int out_width);

// standardize then resize to kModelInputSize square.
ImageTensor preprocess(const ImageTensor& inverted, const ChannelStats& stats);

// Mean over pixels of the channel-mean inverted value, in [0,1].
double ink_intensity(const ImageTensor& inverted);

}  // namespace csca

#endif  // CSCA_IMAGING_HPP_
