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

#include "eco/io.hpp"

#include <openssl/evp.h>
#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "eco/error.hpp"

namespace eco {

namespace fs = std::filesystem;

namespace {

std::uint8_t to_byte(float v) {
  const float scaled = std::round(v * 255.0f);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0f, 255.0f));
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (!in) fail(ErrorCode::kIo, "truncated ECOT header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

Image read_png(const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    fail(ErrorCode::kIo, "cannot read PNG " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    std::string message = image.message;
    png_image_free(&image);
    fail(ErrorCode::kIo, "cannot decode PNG " + path.string() + ": " + message);
  }
  const int h = static_cast<int>(image.height), w = static_cast<int>(image.width);
  Image out(h, w, 3);
  auto data = out.data();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = buffer[i] / 255.0f;
  return out;
}

std::vector<std::uint8_t> encode_png(const Image& img) {
  require(img.channels() == 1 || img.channels() == 3, ErrorCode::kShape,
          "PNG export needs 1 or 3 channels");
  std::vector<std::uint8_t> pixels(img.size());
  auto data = img.data();
  std::transform(data.begin(), data.end(), pixels.begin(), to_byte);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
    fail(ErrorCode::kIo, std::string("PNG encode failed: ") + image.message);
  }
  std::vector<std::uint8_t> bytes(size);
  if (!png_image_write_to_memory(&image, bytes.data(), &size, 0, pixels.data(), 0, nullptr)) {
    fail(ErrorCode::kIo, std::string("PNG encode failed: ") + image.message);
  }
  bytes.resize(size);
  return bytes;
}

void write_png(const fs::path& path, const Image& img) {
  const auto bytes = encode_png(img);
  write_file_atomic(path, {reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

void write_ecot_record(std::ostream& out, std::uint32_t height, std::uint32_t width,
                       std::uint32_t channels, std::span<const float> values) {
  require(static_cast<std::size_t>(height) * width * channels == values.size(), ErrorCode::kShape,
          "ECOT extents do not match value count");
  out.write("ECOT", 4);
  put_u32(out, height);
  put_u32(out, width);
  put_u32(out, channels);
  for (float v : values) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
  }
}

EcotRecord read_ecot_record(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (!in || std::memcmp(magic.data(), "ECOT", 4) != 0) fail(ErrorCode::kIo, "missing ECOT magic");
  EcotRecord rec;
  rec.height = get_u32(in);
  rec.width = get_u32(in);
  rec.channels = get_u32(in);
  const std::size_t n = static_cast<std::size_t>(rec.height) * rec.width * rec.channels;
  std::vector<unsigned char> raw(n * 4);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) fail(ErrorCode::kIo, "truncated ECOT payload");
  rec.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t bits = static_cast<std::uint32_t>(raw[4 * i]) |
                               (static_cast<std::uint32_t>(raw[4 * i + 1]) << 8) |
                               (static_cast<std::uint32_t>(raw[4 * i + 2]) << 16) |
                               (static_cast<std::uint32_t>(raw[4 * i + 3]) << 24);
    std::memcpy(&rec.values[i], &bits, 4);
  }
  return rec;
}

void write_ecot(const fs::path& path, const Image& img) {
  std::ostringstream out;
  write_ecot_record(out, static_cast<std::uint32_t>(img.height()),
                    static_cast<std::uint32_t>(img.width()),
                    static_cast<std::uint32_t>(img.channels()), img.data());
  const std::string bytes = out.str();
  write_file_atomic(path, bytes);
}

Image read_ecot(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  EcotRecord rec = read_ecot_record(in);
  return Image(static_cast<int>(rec.height), static_cast<int>(rec.width),
               static_cast<int>(rec.channels), std::move(rec.values));
}

void write_file_atomic(const fs::path& path, std::span<const char> bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      fs::remove(tmp);
      fail(ErrorCode::kIo, "write failed for " + path.string());
    }
  }
  fs::rename(tmp, path);
}

std::vector<char> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

std::string sha256_hex(std::span<const char> bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr)) {
    fail(ErrorCode::kInternal, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

}  // namespace eco
