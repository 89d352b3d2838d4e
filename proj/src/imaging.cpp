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

#include "csca/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include <jpeglib.h>
#include <png.h>

#include "csca/error.hpp"

namespace csca {

namespace {

enum class Format { kPng, kJpeg, kUnknown };

Format sniff(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError("cannot open image '" + path + "'");
  unsigned char sig[8] = {};
  in.read(reinterpret_cast<char*>(sig), sizeof(sig));
  const auto got = in.gcount();
  if (got >= 8 && png_sig_cmp(sig, 0, 8) == 0) return Format::kPng;
  if (got >= 3 && sig[0] == 0xFF && sig[1] == 0xD8 && sig[2] == 0xFF) return Format::kJpeg;
  return Format::kUnknown;
}

RawImage decode_png(const std::string& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw ImageError("cannot decode PNG '" + path + "': " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  RawImage out;
  out.height = static_cast<int>(image.height);
  out.width = static_cast<int>(image.width);
  out.rgb.resize(PNG_IMAGE_SIZE(image));
  png_color white{255, 255, 255};
  if (!png_image_finish_read(&image, &white, out.rgb.data(), 0, nullptr)) {
    png_image_free(&image);
    throw ImageError("cannot decode PNG '" + path + "': " + image.message);
  }
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

RawImage decode_jpeg(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
  if (!file) throw ImageError("cannot open image '" + path + "'");
  RawImage out;
  std::string failure;
  jpeg_decompress_struct cinfo;
  JpegErrorManager jerr;
  cinfo.err = jpeg_std_error(&jerr.base);
  jerr.base.error_exit = jpeg_error_exit;
  if (setjmp(jerr.jump)) {
    jpeg_destroy_decompress(&cinfo);
    failure = jerr.message;
  } else {
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    if (cinfo.output_components != 3) {
      jpeg_destroy_decompress(&cinfo);
      throw ImageError("unsupported JPEG colour layout in '" + path + "'");
    }
    out.width = static_cast<int>(cinfo.output_width);
    out.height = static_cast<int>(cinfo.output_height);
    out.rgb.resize(static_cast<std::size_t>(out.width) * out.height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
      JSAMPROW row = out.rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) * out.width * 3;
      jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
  }
  if (!failure.empty()) throw ImageError("cannot decode JPEG '" + path + "': " + failure);
  return out;
}

}  // namespace

RawImage decode_image(const std::string& path) {
  RawImage image;
  switch (sniff(path)) {
    case Format::kPng:
      image = decode_png(path);
      break;
    case Format::kJpeg:
      image = decode_jpeg(path);
      break;
    case Format::kUnknown:
      throw ImageError("unrecognized image format: '" + path + "'");
  }
  if (image.width <= 0 || image.height <= 0) throw ImageError("zero-area image: '" + path + "'");
  return image;
}

void write_png(const std::string& path, const RawImage& image) {
  if (image.width <= 0 || image.height <= 0) throw ImageError("cannot write zero-area image");
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, image.rgb.data(), 0, nullptr)) {
    throw ImageError("cannot write PNG '" + path + "': " + png.message);
  }
}

ImageTensor invert(const RawImage& image) {
  if (image.width <= 0 || image.height <= 0) throw ImageError("zero-area image");
  ImageTensor out(image.height, image.width);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < 3; ++c) out.at(c, y, x) = 1.0 - image.at(y, x, c) / 255.0;
    }
  }
  return out;
}

ImageTensor decode_and_invert(const std::string& path) { return invert(decode_image(path)); }

void ChannelStatsAccumulator::add(const ImageTensor& image) {
  // Chan et al. pairwise merge of per-image moments.
  for (int c = 0; c < 3; ++c) {
    const auto plane = image.channel(c);
    const double n = static_cast<double>(plane.size());
    if (n == 0) continue;
    double sum = 0.0;
    for (double v : plane) sum += v;
    const double mean = sum / n;
    double m2 = 0.0;
    for (double v : plane) m2 += (v - mean) * (v - mean);
    const double total = count_[c] + n;
    const double delta = mean - mean_[c];
    mean_[c] += delta * n / total;
    m2_[c] += m2 + delta * delta * count_[c] * n / total;
    count_[c] = total;
  }
  ++images_;
}

ChannelStats ChannelStatsAccumulator::finish() const {
  if (images_ == 0) throw DegenerateInputError("cannot compute channel statistics of an empty training set");
  ChannelStats stats;
  for (int c = 0; c < 3; ++c) {
    stats.mean[c] = mean_[c];
    stats.std[c] = std::max(std::sqrt(m2_[c] / count_[c]), kStdFloor);
  }
  return stats;
}

ChannelStats compute_channel_stats(std::span<const ImageTensor> images) {
  ChannelStatsAccumulator acc;
  for (const auto& img : images) acc.add(img);
  return acc.finish();
}

ChannelStats compute_channel_stats(std::span<const std::string> image_paths) {
  ChannelStatsAccumulator acc;
  for (const auto& path : image_paths) acc.add(decode_and_invert(path));
  return acc.finish();
}

ImageTensor standardize(const ImageTensor& image, const ChannelStats& stats) {
  ImageTensor out = image;
  const std::size_t plane = image.plane_size();
  for (int c = 0; c < 3; ++c) {
    const double m = stats.mean[c];
    const double s = stats.std[c];
    double* p = out.values.data() + c * plane;
    for (std::size_t i = 0; i < plane; ++i) p[i] = (p[i] - m) / s;
  }
  return out;
}

ImageTensor resize_bilinear(const ImageTensor& image, int out_height, int out_width) {
  if (out_height <= 0 || out_width <= 0) throw ImageError("resize target must be positive");
  if (image.height == out_height && image.width == out_width) return image;
  ImageTensor out(out_height, out_width);
  const double sy = static_cast<double>(image.height) / out_height;
  const double sx = static_cast<double>(image.width) / out_width;

  struct Tap {
    int i0, i1;
    double w1;
  };
  auto taps = [](int n_out, int n_in, double scale) {
    std::vector<Tap> t(n_out);
    for (int o = 0; o < n_out; ++o) {
      double src = (o + 0.5) * scale - 0.5;
      src = std::clamp(src, 0.0, static_cast<double>(n_in - 1));
      const int i0 = static_cast<int>(std::floor(src));
      const int i1 = std::min(i0 + 1, n_in - 1);
      t[o] = {i0, i1, src - i0};
    }
    return t;
  };
  const auto ty = taps(out_height, image.height, sy);
  const auto tx = taps(out_width, image.width, sx);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < out_height; ++y) {
      const Tap& a = ty[y];
      for (int x = 0; x < out_width; ++x) {
        const Tap& b = tx[x];
        const double top = image.at(c, a.i0, b.i0) * (1.0 - b.w1) + image.at(c, a.i0, b.i1) * b.w1;
        const double bottom = image.at(c, a.i1, b.i0) * (1.0 - b.w1) + image.at(c, a.i1, b.i1) * b.w1;
        out.at(c, y, x) = top * (1.0 - a.w1) + bottom * a.w1;
      }
    }
  }
  return out;
}

ImageTensor preprocess(const ImageTensor& inverted, const ChannelStats& stats) {
  return resize_bilinear(standardize(inverted, stats), kModelInputSize, kModelInputSize);
}

double ink_intensity(const ImageTensor& inverted) {
  if (inverted.values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : inverted.values) sum += v;
  // Averaging every channel value equals averaging the per-pixel channel means.
  return std::clamp(sum / static_cast<double>(inverted.values.size()), 0.0, 1.0);
}

}  // namespace csca
