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

// Helpers shared by the unit and acceptance suites.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "eco/image.hpp"
#include "eco/resample.hpp"
#include "eco/rng.hpp"
#include "eco/tensor.hpp"

namespace eco::testing {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("eco_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Image random_image(Rng& rng, int h, int w, int c, double lo = 0.0, double hi = 1.0) {
  Image img(h, w, c);
  for (float& v : img.data()) v = static_cast<float>(rng.uniform(lo, hi));
  return img;
}

inline Tensor random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (float& v : t.data()) v = static_cast<float>(rng.uniform(lo, hi));
  return t;
}

// Plain double-precision NCHW array used by reference implementations.
struct DTensor {
  std::vector<int> shape;
  std::vector<double> v;

  DTensor() = default;
  explicit DTensor(std::vector<int> s) : shape(std::move(s)) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    v.assign(n, 0.0);
  }
  static DTensor from(const Tensor& t) {
    DTensor d(t.shape());
    for (std::size_t i = 0; i < t.numel(); ++i) d.v[i] = t[i];
    return d;
  }
  double& at(int n, int c, int h, int w) {
    return v[((static_cast<std::size_t>(n) * shape[1] + c) * shape[2] + h) * shape[3] + w];
  }
  double at(int n, int c, int h, int w) const {
    return v[((static_cast<std::size_t>(n) * shape[1] + c) * shape[2] + h) * shape[3] + w];
  }
};

// Direct-loop cross-correlation with zero padding (K-1)/2.
inline DTensor ref_conv(const DTensor& x, const DTensor& k, const DTensor* bias) {
  const int n = x.shape[0], ci = x.shape[1], h = x.shape[2], w = x.shape[3];
  const int co = k.shape[0], ks = k.shape[2], pad = (ks - 1) / 2;
  DTensor out({n, co, h, w});
  for (int b = 0; b < n; ++b)
    for (int o = 0; o < co; ++o)
      for (int y = 0; y < h; ++y)
        for (int xx = 0; xx < w; ++xx) {
          double acc = bias ? bias->v[o] : 0.0;
          for (int i = 0; i < ci; ++i)
            for (int dy = 0; dy < ks; ++dy)
              for (int dx = 0; dx < ks; ++dx) {
                const int sy = y + dy - pad, sx = xx + dx - pad;
                if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
                acc += k.at(o, i, dy, dx) * x.at(b, i, sy, sx);
              }
          out.at(b, o, y, xx) = acc;
        }
  return out;
}

inline DTensor ref_relu(DTensor x) {
  for (double& e : x.v) e = std::max(e, 0.0);
  return x;
}

inline DTensor ref_shuffle(const DTensor& x, int s) {
  const int n = x.shape[0], c = x.shape[1] / (s * s), h = x.shape[2], w = x.shape[3];
  DTensor out({n, c, h * s, w * s});
  for (int b = 0; b < n; ++b)
    for (int ch = 0; ch < c; ++ch)
      for (int y = 0; y < h; ++y)
        for (int xx = 0; xx < w; ++xx)
          for (int dy = 0; dy < s; ++dy)
            for (int dx = 0; dx < s; ++dx)
              out.at(b, ch, y * s + dy, xx * s + dx) = x.at(b, ch * s * s + dy * s + dx, y, xx);
  return out;
}

// Keys cubic, written out from its piecewise definition.
inline double ref_keys(double t, double a) {
  const double x = std::abs(t);
  if (x < 1.0) return (a + 2.0) * x * x * x - (a + 3.0) * x * x + 1.0;
  if (x < 2.0) return a * x * x * x - 5.0 * a * x * x + 8.0 * a * x - 4.0 * a;
  return 0.0;
}

// Normalized weight of every source index (edge-replicated) for one output
// coordinate, computed by summing over a generous integer window.
inline std::vector<double> ref_weights(int in, int out_index, const ResizeSpec& spec) {
  const double ratio = spec.ratio();
  const double stretch = spec.antialias && ratio < 1.0 ? ratio : 1.0;
  const double center = (out_index + 0.5) / ratio - 0.5;
  const double reach = 2.0 / stretch + 2.0;
  std::vector<double> w(in, 0.0);
  double total = 0.0;
  for (long long k = static_cast<long long>(std::floor(center - reach));
       k <= static_cast<long long>(std::ceil(center + reach)); ++k) {
    const double weight = ref_keys((center - static_cast<double>(k)) * stretch, spec.kernel_a);
    const long long idx = std::clamp<long long>(k, 0, in - 1);
    w[static_cast<std::size_t>(idx)] += weight;
    total += weight;
  }
  for (double& e : w) e /= total;
  return w;
}

// Full double sum out(i, j) = sum_p sum_q wr(i, p) wc(j, q) in(p, q), clamped
// to [0, 1] at the end.
inline std::vector<double> ref_resize(const Image& img, const ResizeSpec& spec, int* out_h, int* out_w) {
  const int h = img.height(), w = img.width(), c = img.channels();
  const int oh = spec.output_extent(h), ow = spec.output_extent(w);
  std::vector<std::vector<double>> wr(oh), wc(ow);
  for (int i = 0; i < oh; ++i) wr[i] = ref_weights(h, i, spec);
  for (int j = 0; j < ow; ++j) wc[j] = ref_weights(w, j, spec);
  std::vector<double> out(static_cast<std::size_t>(oh) * ow * c, 0.0);
  for (int i = 0; i < oh; ++i)
    for (int j = 0; j < ow; ++j)
      for (int ch = 0; ch < c; ++ch) {
        double acc = 0.0;
        for (int p = 0; p < h; ++p)
          for (int q = 0; q < w; ++q) acc += wr[i][p] * wc[j][q] * img.at(p, q, ch);
        out[(static_cast<std::size_t>(i) * ow + j) * c + ch] = std::clamp(acc, 0.0, 1.0);
      }
  *out_h = oh;
  *out_w = ow;
  return out;
}

// SSIM evaluated window by window with an explicit 11x11 Gaussian.
inline double ref_ssim(const Image& a, const Image& b) {
  const int r = 5;
  double g[11][11];
  double gsum = 0.0;
  for (int y = -r; y <= r; ++y)
    for (int x = -r; x <= r; ++x) {
      g[y + r][x + r] = std::exp(-(x * x + y * y) / (2.0 * 1.5 * 1.5));
      gsum += g[y + r][x + r];
    }
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double total = 0.0;
  int count = 0;
  for (int cy = r; cy < a.height() - r; ++cy)
    for (int cx = r; cx < a.width() - r; ++cx) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x) {
          const double wgt = g[y + r][x + r] / gsum;
          const double va = a.at(cy + y, cx + x, 0), vb = b.at(cy + y, cx + x, 0);
          ma += wgt * va;
          mb += wgt * vb;
          saa += wgt * va * va;
          sbb += wgt * vb * vb;
          sab += wgt * va * vb;
        }
      const double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  return total / count;
}

}  // namespace eco::testing
