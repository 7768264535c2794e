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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "eco/image.hpp"

namespace eco {

// 8-bit RGB PNG. Grayscale/alpha inputs are expanded/stripped to RGB.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img);
std::vector<std::uint8_t> encode_png(const Image& img);

// ECOT raw tensor record: "ECOT", uint32 LE H, W, C, then H*W*C LE float32.
struct EcotRecord {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t channels = 0;
  std::vector<float> values;
};

void write_ecot_record(std::ostream& out, std::uint32_t height, std::uint32_t width,
                       std::uint32_t channels, std::span<const float> values);
EcotRecord read_ecot_record(std::istream& in);

void write_ecot(const std::filesystem::path& path, const Image& img);
Image read_ecot(const std::filesystem::path& path);

// Writes to a sibling temporary and renames, so readers never observe a
// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::span<const char> bytes);
std::vector<char> read_file(const std::filesystem::path& path);
std::string sha256_hex(std::span<const char> bytes);

}  // namespace eco
