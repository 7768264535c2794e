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

#include "eco/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eco/error.hpp"

namespace eco {

int ResizeSpec::output_extent(int input_extent) const {
  const long long twice = 2LL * input_extent * num + den;
  return static_cast<int>(twice / (2LL * den));
}

ResizeSpec ResizeSpec::downscale(int factor, bool antialias, double kernel_a) {
  require(factor >= 1, ErrorCode::kInvalidArgument, "downscale factor must be >= 1");
  return ResizeSpec{1, factor, antialias, kernel_a};
}

ResizeSpec ResizeSpec::parse(const std::string& scale, bool antialias, double kernel_a) {
  ResizeSpec spec;
  spec.antialias = antialias;
  spec.kernel_a = kernel_a;
  try {
    if (auto slash = scale.find('/'); slash != std::string::npos) {
      spec.num = std::stoi(scale.substr(0, slash));
      spec.den = std::stoi(scale.substr(slash + 1));
    } else {
      const double value = std::stod(scale);
      // Closest fraction with a small denominator.
      int best_den = 1;
      double best_err = 1e300;
      for (int den = 1; den <= 1000; ++den) {
        const double err = std::abs(std::round(value * den) / den - value);
        if (err < best_err - 1e-12) {
          best_err = err;
          best_den = den;
        }
      }
      spec.den = best_den;
      spec.num = static_cast<int>(std::lround(value * best_den));
    }
  } catch (const std::logic_error&) {
    fail(ErrorCode::kInvalidArgument, "cannot parse scale '" + scale + "'");
  }
  if (spec.num <= 0 || spec.den <= 0) {
    fail(ErrorCode::kInvalidArgument, "scale must be positive, got '" + scale + "'");
  }
  const int g = std::gcd(spec.num, spec.den);
  spec.num /= g;
  spec.den /= g;
  return spec;
}

double cubic_kernel(double t, double a) {
  const double x = std::abs(t);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

ResampleTaps resample_taps(int input_extent, int output_extent, const ResizeSpec& spec) {
  require(input_extent >= 1, ErrorCode::kShape, "resample input extent must be >= 1");
  require(output_extent >= 1, ErrorCode::kShape, "resample output extent must be >= 1");
  const double ratio = spec.ratio();
  const bool stretch = spec.antialias && ratio < 1.0;
  const double kscale = stretch ? ratio : 1.0;
  const double support = 2.0 / kscale;
  ResampleTaps taps;
  taps.first.resize(output_extent);
  taps.weights.resize(output_extent);
  for (int i = 0; i < output_extent; ++i) {
    const double center = (i + 0.5) / ratio - 0.5;
    const int lo = static_cast<int>(std::floor(center - support));
    const int hi = static_cast<int>(std::ceil(center + support));
    std::vector<double> w(static_cast<std::size_t>(hi - lo + 1));
    double total = 0.0;
    for (int j = lo; j <= hi; ++j) {
      const double v = cubic_kernel((center - j) * kscale, spec.kernel_a);
      w[j - lo] = v;
      total += v;
    }
    for (double& v : w) v /= total;
    taps.first[i] = lo;
    taps.weights[i] = std::move(w);
  }
  return taps;
}

Image resize_unclamped(const Image& img, const ResizeSpec& spec) {
  require(img.height() >= 1 && img.width() >= 1, ErrorCode::kShape, "cannot resize an empty image");
  require(spec.num > 0 && spec.den > 0, ErrorCode::kInvalidArgument, "resize scale must be positive");
  const int out_h = spec.output_extent(img.height());
  const int out_w = spec.output_extent(img.width());
  if (out_h < 1 || out_w < 1) {
    fail(ErrorCode::kShape, "resize of " + std::to_string(img.height()) + "x" +
                                std::to_string(img.width()) + " by " + std::to_string(spec.num) +
                                "/" + std::to_string(spec.den) + " gives an empty image");
  }
  const int in_h = img.height(), in_w = img.width(), c = img.channels();
  const ResampleTaps col_taps = resample_taps(in_w, out_w, spec);
  const ResampleTaps row_taps = resample_taps(in_h, out_h, spec);

  // Horizontal pass: in_h x out_w x c.
  std::vector<double> mid(static_cast<std::size_t>(in_h) * out_w * c, 0.0);
  for (int y = 0; y < in_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const auto& w = col_taps.weights[x];
      double* dst = &mid[(static_cast<std::size_t>(y) * out_w + x) * c];
      for (std::size_t k = 0; k < w.size(); ++k) {
        const int sx = std::clamp(col_taps.first[x] + static_cast<int>(k), 0, in_w - 1);
        for (int ch = 0; ch < c; ++ch) dst[ch] += w[k] * img.at(y, sx, ch);
      }
    }
  }
  // Vertical pass.
  Image out(out_h, out_w, c);
  std::vector<double> acc(c);
  for (int y = 0; y < out_h; ++y) {
    const auto& w = row_taps.weights[y];
    for (int x = 0; x < out_w; ++x) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t k = 0; k < w.size(); ++k) {
        const int sy = std::clamp(row_taps.first[y] + static_cast<int>(k), 0, in_h - 1);
        const double* src = &mid[(static_cast<std::size_t>(sy) * out_w + x) * c];
        for (int ch = 0; ch < c; ++ch) acc[ch] += w[k] * src[ch];
      }
      for (int ch = 0; ch < c; ++ch) out.at(y, x, ch) = static_cast<float>(acc[ch]);
    }
  }
  return out;
}

Image resize(const Image& img, const ResizeSpec& spec) { return resize_unclamped(img, spec).clamped(); }

Image rgb_to_y(const Image& img) {
  if (img.channels() != 3) {
    fail(ErrorCode::kShape, "rgb_to_y expects 3 channels, got " + std::to_string(img.channels()));
  }
  Image out(img.height(), img.width(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double v = 16.0 + 65.481 * img.at(y, x, 0) + 128.553 * img.at(y, x, 1) +
                       24.966 * img.at(y, x, 2);
      out.at(y, x, 0) = static_cast<float>(v / 255.0);
    }
  }
  return out;
}

}  // namespace eco
