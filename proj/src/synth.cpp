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

#include "eco/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "eco/error.hpp"
#include "eco/io.hpp"
#include "eco/rng.hpp"

namespace eco {

namespace {

using Color = std::array<double, 3>;

Color random_color(Rng& rng) { return {rng.uniform(), rng.uniform(), rng.uniform()}; }

}  // namespace

Image synth_image(int height, int width, std::uint64_t seed) {
  require(height >= 1 && width >= 1, ErrorCode::kInvalidArgument, "synthetic image must be non-empty");
  Rng rng(seed);
  const double pi = std::acos(-1.0);
  Image img(height, width, 3);

  const Color c0 = random_color(rng), c1 = random_color(rng);
  const double theta = rng.uniform(0.0, 2.0 * pi);
  const double gx = std::cos(theta), gy = std::sin(theta);
  const double norm = std::abs(gx) * width + std::abs(gy) * height;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double t = std::clamp(0.5 + (gx * (x - width / 2.0) + gy * (y - height / 2.0)) / norm, 0.0, 1.0);
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = static_cast<float>(c0[c] + t * (c1[c] - c0[c]));
    }

  const int shapes = 6 + static_cast<int>(rng.below(7));
  for (int s = 0; s < shapes; ++s) {
    const Color col = random_color(rng);
    const bool disk = rng.uniform() < 0.5;
    const double cy = rng.uniform(0, height), cx = rng.uniform(0, width);
    const double ry = rng.uniform(0.08, 0.3) * height, rx = rng.uniform(0.08, 0.3) * width;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        // 2x2 supersampled coverage.
        int hits = 0;
        for (int sy = 0; sy < 2; ++sy)
          for (int sx = 0; sx < 2; ++sx) {
            const double py = y + 0.25 + 0.5 * sy - cy, px = x + 0.25 + 0.5 * sx - cx;
            const bool inside = disk ? (py * py) / (ry * ry) + (px * px) / (rx * rx) <= 1.0
                                     : std::abs(py) <= ry && std::abs(px) <= rx;
            hits += inside;
          }
        if (!hits) continue;
        const double cover = hits / 4.0;
        for (int c = 0; c < 3; ++c) {
          float& v = img.at(y, x, c);
          v = static_cast<float>(v + cover * (col[c] - v));
        }
      }
  }

  // Thin strokes.
  const int strokes = 2 + static_cast<int>(rng.below(4));
  for (int s = 0; s < strokes; ++s) {
    const Color col = random_color(rng);
    const double y0 = rng.uniform(0, height), x0 = rng.uniform(0, width);
    const double angle = rng.uniform(0.0, pi);
    const double len = rng.uniform(0.3, 0.8) * std::max(height, width);
    const double half = rng.uniform(0.6, 1.8);
    const double dy = std::sin(angle), dx = std::cos(angle);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const double py = y + 0.5 - y0, px = x + 0.5 - x0;
        const double along = px * dx + py * dy;
        const double across = std::abs(-px * dy + py * dx);
        if (along < 0.0 || along > len) continue;
        const double cover = std::clamp(half + 0.5 - across, 0.0, 1.0);
        if (cover <= 0.0) continue;
        for (int c = 0; c < 3; ++c) {
          float& v = img.at(y, x, c);
          v = static_cast<float>(v + cover * (col[c] - v));
        }
      }
  }

  // Grating in a random window.
  {
    const double freq = rng.uniform(0.12, 0.4);
    const double phi = rng.uniform(0.0, pi);
    const double amp = rng.uniform(0.08, 0.2);
    const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(height / 2 + 1)));
    const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(width / 2 + 1)));
    const int y1 = std::min(height, y0 + height / 3 + static_cast<int>(rng.below(static_cast<std::uint64_t>(height / 3 + 1))));
    const int x1 = std::min(width, x0 + width / 3 + static_cast<int>(rng.below(static_cast<std::uint64_t>(width / 3 + 1))));
    const double ux = std::cos(phi), uy = std::sin(phi);
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) {
        const double w = amp * std::sin(2.0 * pi * freq * (ux * x + uy * y));
        for (int c = 0; c < 3; ++c) img.at(y, x, c) = static_cast<float>(img.at(y, x, c) + w);
      }
  }

  // Fine texture: independent per pixel.
  const double texture = rng.uniform(0.03, 0.09);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double n = rng.uniform(-texture, texture);
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = static_cast<float>(img.at(y, x, c) + n);
    }
  return img.clamped();
}

void write_synth_corpus(const std::filesystem::path& dir, int count, int size, std::uint64_t seed) {
  require(count >= 1 && size >= 1, ErrorCode::kInvalidArgument, "corpus needs count >= 1 and size >= 1");
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "img_%03d.png", i);
    write_png(dir / name, synth_image(size, size, Rng::mix(seed + static_cast<std::uint64_t>(i))));
  }
}

}  // namespace eco
