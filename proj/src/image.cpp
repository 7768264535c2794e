/*
  Copyright 2026 The eco-sr Authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

#include "eco/image.hpp"

#include <algorithm>
#include <cmath>

#include "eco/error.hpp"

namespace eco {

namespace {

void check_same(const Image& a, const Image& b, const char* what) {
  if (!a.same_extents(b)) {
    fail(ErrorCode::kShape, std::string(what) + ": extent mismatch " +
                                std::to_string(a.height()) + "x" + std::to_string(a.width()) + "x" +
                                std::to_string(a.channels()) + " vs " + std::to_string(b.height()) +
                                "x" + std::to_string(b.width()) + "x" + std::to_string(b.channels()));
  }
}

}  // namespace

Image::Image(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  require(height >= 0 && width >= 0 && channels >= 0, ErrorCode::kShape, "negative image extent");
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

Image::Image(int height, int width, int channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(data.begin(), data.end()) {
  require(height >= 0 && width >= 0 && channels >= 0, ErrorCode::kShape, "negative image extent");
  require(data_.size() == static_cast<std::size_t>(height) * width * channels, ErrorCode::kShape,
          "image data length does not match extents");
}

Image Image::crop(int y0, int x0, int height, int width) const {
  if (y0 < 0 || x0 < 0 || height < 0 || width < 0 || y0 + height > height_ || x0 + width > width_) {
    fail(ErrorCode::kShape, "crop window (" + std::to_string(y0) + "," + std::to_string(x0) + ") " +
                                std::to_string(height) + "x" + std::to_string(width) +
                                " outside image " + std::to_string(height_) + "x" +
                                std::to_string(width_));
  }
  Image out(height, width, channels_);
  for (int y = 0; y < height; ++y) {
    const float* src = data_.data() + index(y0 + y, x0, 0);
    std::copy(src, src + static_cast<std::size_t>(width) * channels_,
              out.data_.data() + out.index(y, 0, 0));
  }
  return out;
}

Image Image::clamped() const {
  Image out = *this;
  for (float& v : out.data_) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

Image lerp(const Image& from, const Image& to, float t) {
  check_same(from, to, "lerp");
  Image out = from;
  auto o = out.data();
  auto b = to.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = o[i] + t * (b[i] - o[i]);
  return out;
}

Image subtract(const Image& a, const Image& b) {
  check_same(a, b, "subtract");
  Image out = a;
  auto o = out.data();
  auto bv = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bv[i];
  return out;
}

Image add_scalar(const Image& a, float value) {
  Image out = a;
  for (float& v : out.data()) v += value;
  return out;
}

double mean_abs(const Image& a) {
  if (a.empty()) return 0.0;
  double total = 0.0;
  for (float v : a.data()) total += std::abs(static_cast<double>(v));
  return total / static_cast<double>(a.size());
}

double mean_abs_diff(const Image& a, const Image& b) {
  check_same(a, b, "mean_abs_diff");
  if (a.empty()) return 0.0;
  double total = 0.0;
  auto av = a.data();
  auto bv = b.data();
  for (std::size_t i = 0; i < av.size(); ++i) total += std::abs(static_cast<double>(av[i]) - bv[i]);
  return total / static_cast<double>(a.size());
}

double max_abs_diff(const Image& a, const Image& b) {
  check_same(a, b, "max_abs_diff");
  double worst = 0.0;
  auto av = a.data();
  auto bv = b.data();
  for (std::size_t i = 0; i < av.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<double>(av[i]) - bv[i]));
  }
  return worst;
}

Tensor images_to_tensor(std::span<const Image> images) {
  require(!images.empty(), ErrorCode::kInvalidArgument, "empty image batch");
  const Image& first = images.front();
  const int n = static_cast<int>(images.size());
  const int c = first.channels(), h = first.height(), w = first.width();
  Tensor t({n, c, h, w});
  for (int b = 0; b < n; ++b) {
    check_same(first, images[b], "images_to_tensor");
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int ch = 0; ch < c; ++ch) t.at(b, ch, y, x) = images[b].at(y, x, ch);
  }
  return t;
}

Image tensor_to_image(const Tensor& t, int n) {
  require(t.rank() == 4, ErrorCode::kShape, "tensor_to_image expects NCHW");
  const int c = t.dim(1), h = t.dim(2), w = t.dim(3);
  Image img(h, w, c);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int ch = 0; ch < c; ++ch) img.at(y, x, ch) = t.at(n, ch, y, x);
  return img;
}

}  // namespace eco
