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

#include <string>
#include <vector>

#include "eco/image.hpp"

namespace eco {

// Output/input size ratio as num/den. The same spec drives dataset
// preparation and every training-time downsample.
struct ResizeSpec {
  int num = 1;
  int den = 1;
  bool antialias = true;
  double kernel_a = -0.5;

  double ratio() const { return static_cast<double>(num) / den; }
  int output_extent(int input_extent) const;

  static ResizeSpec downscale(int factor, bool antialias = true, double kernel_a = -0.5);
  // Accepts "p/q" or a decimal such as "0.5".
  static ResizeSpec parse(const std::string& scale, bool antialias = true, double kernel_a = -0.5);
};

// Keys cubic convolution kernel.
double cubic_kernel(double t, double a);

// Per-output-sample taps along one axis, normalized to sum 1.
struct ResampleTaps {
  std::vector<int> first;  // first (unclamped) source index per output
  std::vector<std::vector<double>> weights;
};

ResampleTaps resample_taps(int input_extent, int output_extent, const ResizeSpec& spec);

// Separable resampler: rows, then columns, unclamped in between; the result
// is clamped to [0, 1] once at the end. Source coordinates are clamped to
// the edge.
Image resize(const Image& img, const ResizeSpec& spec);
Image resize_unclamped(const Image& img, const ResizeSpec& spec);

Image rgb_to_y(const Image& img);

}  // namespace eco
