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

#include <cstdint>
#include <filesystem>

#include "eco/image.hpp"

namespace eco {

// Procedural RGB test image: smooth background, flat shapes with sharp
// edges, an oriented grating and fine per-pixel texture that cannot be
// recovered from a downsampled copy.
Image synth_image(int height, int width, std::uint64_t seed);

// Writes `count` PNGs named img_000.png... into `dir`.
void write_synth_corpus(const std::filesystem::path& dir, int count, int size, std::uint64_t seed);

}  // namespace eco
