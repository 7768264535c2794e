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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "eco/tensor.hpp"

namespace eco {

// H x W x C float image, row-major, channel-last. Nominal range [0, 1].
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, float fill = 0.0f);
  Image(int height, int width, int channels, std::vector<float> data);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool same_extents(const Image& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  float& at(int y, int x, int c) { return data_[index(y, x, c)]; }
  float at(int y, int x, int c) const { return data_[index(y, x, c)]; }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  Image crop(int y0, int x0, int height, int width) const;
  Image clamped() const;

  bool operator==(const Image& other) const = default;

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  FloatBuffer data_;
};

// Elementwise helpers on same-extent images.
Image lerp(const Image& from, const Image& to, float t);  // from + t*(to-from)
Image subtract(const Image& a, const Image& b);
Image add_scalar(const Image& a, float value);
double mean_abs(const Image& a);
double mean_abs_diff(const Image& a, const Image& b);
double max_abs_diff(const Image& a, const Image& b);

// Batch <-> NCHW tensor conversion; all images must share extents.
Tensor images_to_tensor(std::span<const Image> images);
Image tensor_to_image(const Tensor& t, int n);

}  // namespace eco
