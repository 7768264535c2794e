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

#include "eco/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "eco/error.hpp"
#include "eco/io.hpp"

namespace eco {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kIo, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& doc) {
  const std::string text = doc.dump(2) + "\n";
  write_file_atomic(path, text);
}

}  // namespace

DatasetManifest prepare_dataset(const fs::path& hr_dir, const fs::path& out_dir, int scale,
                                bool antialias, double kernel_a, bool force) {
  require(scale >= 1, ErrorCode::kInvalidArgument, "scale must be >= 1");
  if (!fs::is_directory(hr_dir)) fail(ErrorCode::kIo, "HR directory " + hr_dir.string() + " not found");
  std::vector<fs::path> sources;
  for (const auto& entry : fs::directory_iterator(hr_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") sources.push_back(entry.path());
  }
  std::sort(sources.begin(), sources.end());
  if (sources.empty()) fail(ErrorCode::kIo, "no PNG images in " + hr_dir.string());
  if (fs::exists(out_dir / "manifest.json") && !force) {
    fail(ErrorCode::kState, "dataset already prepared in " + out_dir.string() + " (use --force)");
  }

  DatasetManifest manifest;
  manifest.root = out_dir;
  manifest.scale = scale;
  manifest.spec = ResizeSpec::downscale(scale, antialias, kernel_a);
  for (const fs::path& src : sources) {
    Image hr = read_png(src);
    const int h = hr.height() / scale * scale;
    const int w = hr.width() / scale * scale;
    if (h == 0 || w == 0) fail(ErrorCode::kShape, src.string() + " is smaller than the scale factor");
    hr = hr.crop(0, 0, h, w);
    const Image lr = resize(hr, manifest.spec);
    ManifestItem item;
    item.id = src.stem().string();
    item.hr_path = "hr/" + item.id + ".png";
    item.lr_path = "lr/" + item.id + ".png";
    item.lr_raw_path = "lr/" + item.id + ".ecot";
    write_png(out_dir / item.hr_path, hr);
    write_png(out_dir / item.lr_path, lr);
    write_ecot(out_dir / item.lr_raw_path, lr);
    manifest.items.push_back(std::move(item));
  }
  write_manifest(manifest);
  return manifest;
}

void write_manifest(const DatasetManifest& manifest) {
  json items = json::array();
  for (const auto& item : manifest.items) {
    json j = {{"id", item.id}, {"hr", item.hr_path}, {"lr", item.lr_path}, {"lr_raw", item.lr_raw_path}};
    if (item.centroid_path) j["centroid"] = *item.centroid_path;
    items.push_back(std::move(j));
  }
  const json doc = {
      {"format", "eco-manifest/1"},
      {"scale", manifest.scale},
      {"resize",
       {{"num", manifest.spec.num}, {"den", manifest.spec.den},
        {"antialias", manifest.spec.antialias}, {"kernel_a", manifest.spec.kernel_a}}},
      {"items", items},
  };
  write_json_file(manifest.root / "manifest.json", doc);
}

DatasetManifest read_manifest(const fs::path& dir_or_file) {
  const fs::path file = fs::is_directory(dir_or_file) ? dir_or_file / "manifest.json" : dir_or_file;
  if (!fs::exists(file)) {
    fail(ErrorCode::kIo, "dataset manifest " + file.string() + " not found (run prepare-data)");
  }
  const json doc = read_json_file(file);
  DatasetManifest m;
  m.root = file.parent_path();
  try {
    m.scale = doc.at("scale").get<int>();
    const auto& r = doc.at("resize");
    m.spec = ResizeSpec{r.at("num").get<int>(), r.at("den").get<int>(), r.at("antialias").get<bool>(),
                        r.at("kernel_a").get<double>()};
    for (const auto& j : doc.at("items")) {
      ManifestItem item;
      item.id = j.at("id").get<std::string>();
      item.hr_path = j.at("hr").get<std::string>();
      item.lr_path = j.at("lr").get<std::string>();
      item.lr_raw_path = j.at("lr_raw").get<std::string>();
      if (j.contains("centroid")) item.centroid_path = j.at("centroid").get<std::string>();
      m.items.push_back(std::move(item));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kIo, "malformed manifest " + file.string() + ": " + e.what());
  }
  return m;
}

std::vector<DatasetItem> load_items(const DatasetManifest& manifest) {
  std::vector<DatasetItem> items;
  items.reserve(manifest.items.size());
  for (const auto& entry : manifest.items) {
    DatasetItem item{entry.id, read_png(manifest.resolve(entry.hr_path)),
                     read_ecot(manifest.resolve(entry.lr_raw_path)), {}};
    if (item.lr.height() * manifest.scale != item.hr.height() ||
        item.lr.width() * manifest.scale != item.hr.width()) {
      fail(ErrorCode::kShape, "item " + entry.id + ": LR extents are not HR / scale");
    }
    if (entry.centroid_path) item.centroid = read_ecot(manifest.resolve(*entry.centroid_path));
    items.push_back(std::move(item));
  }
  return items;
}

std::optional<fs::path> CentroidCache::path_for(const std::string& id) const {
  for (const auto& [item, file] : files) {
    if (item == id) return dir / file;
  }
  return std::nullopt;
}

CentroidCache generate_centroids(const DatasetManifest& manifest, const Model& teacher,
                                 const std::string& teacher_hash, const fs::path& cache_dir,
                                 bool force) {
  if (teacher.config().scale != manifest.scale) {
    fail(ErrorCode::kInvalidArgument, "teacher scale " + std::to_string(teacher.config().scale) +
                                          " does not match dataset scale " +
                                          std::to_string(manifest.scale));
  }
  if (fs::exists(cache_dir / "index.json")) {
    if (!force) fail(ErrorCode::kState, "centroid cache " + cache_dir.string() + " exists (use --force)");
    fs::remove_all(cache_dir);
  }
  CentroidCache cache{cache_dir, teacher_hash, manifest.scale, {}};
  json entries = json::array();
  for (const auto& entry : manifest.items) {
    const Image lr = read_ecot(manifest.resolve(entry.lr_raw_path));
    const Image mu = teacher.infer(lr);
    const std::string file = entry.id + ".ecot";
    write_ecot(cache_dir / file, mu);
    cache.files.emplace_back(entry.id, file);
    entries.push_back({{"id", entry.id}, {"file", file}});
  }
  // The index is written last: its presence marks a complete cache.
  write_json_file(cache_dir / "index.json", {{"format", "eco-centroids/1"},
                                             {"teacher_hash", teacher_hash},
                                             {"scale", manifest.scale},
                                             {"items", entries}});
  return cache;
}

CentroidCache read_centroid_cache(const fs::path& cache_dir) {
  const fs::path index = cache_dir / "index.json";
  if (!fs::exists(index)) {
    fail(ErrorCode::kState, "centroid cache not found in " + cache_dir.string() +
                                " (run gen-centroids first)");
  }
  const json doc = read_json_file(index);
  CentroidCache cache;
  cache.dir = cache_dir;
  try {
    cache.teacher_hash = doc.at("teacher_hash").get<std::string>();
    cache.scale = doc.at("scale").get<int>();
    for (const auto& j : doc.at("items")) {
      cache.files.emplace_back(j.at("id").get<std::string>(), j.at("file").get<std::string>());
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kIo, "malformed centroid index " + index.string() + ": " + e.what());
  }
  return cache;
}

void attach_centroids(std::vector<DatasetItem>& items, const CentroidCache& cache) {
  for (auto& item : items) {
    const auto path = cache.path_for(item.id);
    if (!path) {
      fail(ErrorCode::kState, "centroid cache has no entry for item " + item.id +
                                  " (re-run gen-centroids)");
    }
    item.centroid = read_ecot(*path);
    if (!item.centroid.same_extents(item.hr)) {
      fail(ErrorCode::kShape, "centroid extents for " + item.id + " do not match HR");
    }
  }
}

PatchTuple sample_patch(const DatasetItem& item, int scale, int lr_patch, Rng& rng,
                        std::optional<std::pair<int, int>> forced_offset) {
  require(lr_patch >= 1, ErrorCode::kInvalidArgument, "patch size must be >= 1");
  if (item.lr.height() < lr_patch || item.lr.width() < lr_patch) {
    fail(ErrorCode::kShape, "item " + item.id + " (" + std::to_string(item.lr.height()) + "x" +
                                std::to_string(item.lr.width()) + " LR) is smaller than patch " +
                                std::to_string(lr_patch));
  }
  int oy, ox;
  if (forced_offset) {
    std::tie(oy, ox) = *forced_offset;
  } else {
    oy = static_cast<int>(rng.below(static_cast<std::uint64_t>(item.lr.height() - lr_patch + 1)));
    ox = static_cast<int>(rng.below(static_cast<std::uint64_t>(item.lr.width() - lr_patch + 1)));
  }
  PatchTuple t;
  t.lr = item.lr.crop(oy, ox, lr_patch, lr_patch);
  t.hr = item.hr.crop(scale * oy, scale * ox, scale * lr_patch, scale * lr_patch);
  if (!item.centroid.empty()) {
    t.centroid = item.centroid.crop(scale * oy, scale * ox, scale * lr_patch, scale * lr_patch);
  }
  return t;
}

Image dihedral(const Image& img, int k) {
  require(k >= 0 && k < 8, ErrorCode::kInvalidArgument, "dihedral index must be in [0, 8)");
  if (img.empty()) return img;
  const bool transpose = k & 4, vflip = k & 2, hflip = k & 1;
  const int h = transpose ? img.width() : img.height();
  const int w = transpose ? img.height() : img.width();
  Image out(h, w, img.channels());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // Inverse map from output (y, x) back through flips, then transpose.
      int ty = vflip ? h - 1 - y : y;
      int tx = hflip ? w - 1 - x : x;
      if (transpose) std::swap(ty, tx);
      for (int c = 0; c < img.channels(); ++c) out.at(y, x, c) = img.at(ty, tx, c);
    }
  }
  return out;
}

PatchTuple augment_with(const PatchTuple& tuple, int k) {
  require(tuple.hr.height() == tuple.hr.width() && tuple.lr.height() == tuple.lr.width(),
          ErrorCode::kShape, "augment requires square patches");
  return {dihedral(tuple.hr, k), dihedral(tuple.lr, k), dihedral(tuple.centroid, k)};
}

PatchTuple augment(const PatchTuple& tuple, Rng& rng) {
  return augment_with(tuple, static_cast<int>(rng.below(8)));
}

void AlphaSchedule::validate() const {
  require(ramp_end_fraction > 0.0 && ramp_end_fraction <= 1.0, ErrorCode::kConfig,
          "alpha_schedule.ramp_end_fraction must be in (0, 1]");
  require(alpha_start >= 0.0 && alpha_start <= 1.0 && alpha_end >= 0.0 && alpha_end <= 1.0,
          ErrorCode::kConfig, "alpha_schedule endpoints must lie in [0, 1]");
  require(alpha_end >= alpha_start, ErrorCode::kConfig,
          "alpha_schedule must be nondecreasing (alpha_end >= alpha_start)");
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kConstant: return "constant";
    case ScheduleKind::kLinearRamp: return "linear_ramp";
    case ScheduleKind::kStep: return "step";
    case ScheduleKind::kCosineRamp: return "cosine_ramp";
  }
  return "unknown";
}

ScheduleKind parse_schedule_kind(const std::string& name) {
  if (name == "constant") return ScheduleKind::kConstant;
  if (name == "linear_ramp") return ScheduleKind::kLinearRamp;
  if (name == "step") return ScheduleKind::kStep;
  if (name == "cosine_ramp") return ScheduleKind::kCosineRamp;
  fail(ErrorCode::kConfig, "unknown alpha schedule kind '" + name + "'");
}

double alpha_at(const AlphaSchedule& schedule, long step, long total_steps) {
  require(total_steps > 0 && step >= 0 && step <= total_steps, ErrorCode::kInvalidArgument,
          "alpha_at requires 0 <= step <= total");
  const double span = schedule.alpha_end - schedule.alpha_start;
  const double ramp = schedule.ramp_end_fraction * static_cast<double>(total_steps);
  const double progress = std::clamp(static_cast<double>(step) / ramp, 0.0, 1.0);
  switch (schedule.kind) {
    case ScheduleKind::kConstant: return schedule.alpha_start;
    case ScheduleKind::kLinearRamp: return schedule.alpha_start + span * progress;
    case ScheduleKind::kStep:
      return static_cast<double>(step) < ramp ? schedule.alpha_start : schedule.alpha_end;
    case ScheduleKind::kCosineRamp: {
      const double pi = std::acos(-1.0);
      return schedule.alpha_start + span * 0.5 * (1.0 - std::cos(pi * progress));
    }
  }
  return schedule.alpha_end;
}

BatchSampler::BatchSampler(std::uint64_t seed, std::size_t n_items, int batch_size)
    : seed_(seed), n_items_(n_items), batch_size_(batch_size) {
  require(n_items > 0, ErrorCode::kInvalidArgument, "batch sampler needs at least one item");
  require(batch_size >= 1, ErrorCode::kInvalidArgument, "batch size must be >= 1");
}

const std::vector<std::size_t>& BatchSampler::permutation(std::uint64_t epoch) {
  if (epoch != cached_epoch_) {
    cached_perm_.resize(n_items_);
    for (std::size_t i = 0; i < n_items_; ++i) cached_perm_[i] = i;
    Rng rng(seed_, 0x5045524dULL + epoch);
    for (std::size_t i = n_items_; i > 1; --i) std::swap(cached_perm_[i - 1], cached_perm_[rng.below(i)]);
    cached_epoch_ = epoch;
  }
  return cached_perm_;
}

std::vector<SampleRef> BatchSampler::batch(long step) {
  std::vector<SampleRef> refs;
  refs.reserve(static_cast<std::size_t>(batch_size_));
  for (int j = 0; j < batch_size_; ++j) {
    const std::uint64_t k = static_cast<std::uint64_t>(step) * batch_size_ + j;
    const auto& perm = permutation(k / n_items_);
    refs.push_back({perm[k % n_items_], Rng::mix(seed_ ^ Rng::mix(k + 1))});
  }
  return refs;
}

}  // namespace eco
