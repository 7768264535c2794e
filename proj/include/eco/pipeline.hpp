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
#include <optional>
#include <string>
#include <vector>

#include "eco/image.hpp"
#include "eco/model.hpp"
#include "eco/resample.hpp"
#include "eco/rng.hpp"

namespace eco {

struct ManifestItem {
  std::string id;
  std::string hr_path;      // cropped HR PNG, relative to the manifest directory
  std::string lr_path;      // 8-bit LR PNG
  std::string lr_raw_path;  // lossless float LR (ECOT)
  std::optional<std::string> centroid_path;
};

struct DatasetManifest {
  std::filesystem::path root;  // directory holding manifest.json
  int scale = 2;
  ResizeSpec spec;  // downscale spec used to generate LR
  std::vector<ManifestItem> items;

  std::filesystem::path resolve(const std::string& relative) const { return root / relative; }
};

DatasetManifest prepare_dataset(const std::filesystem::path& hr_dir,
                                const std::filesystem::path& out_dir, int scale,
                                bool antialias, double kernel_a, bool force);
void write_manifest(const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& dir_or_file);

// Item images held in memory. The centroid is empty when no cache is bound.
struct DatasetItem {
  std::string id;
  Image hr;
  Image lr;
  Image centroid;
};

std::vector<DatasetItem> load_items(const DatasetManifest& manifest);

// Empirical-centroid cache: one ECOT per item plus index.json binding the
// cache to the teacher checkpoint hash.
struct CentroidCache {
  std::filesystem::path dir;
  std::string teacher_hash;
  int scale = 0;
  std::vector<std::pair<std::string, std::string>> files;  // id -> file name

  std::optional<std::filesystem::path> path_for(const std::string& id) const;
};

CentroidCache generate_centroids(const DatasetManifest& manifest, const Model& teacher,
                                 const std::string& teacher_hash,
                                 const std::filesystem::path& cache_dir, bool force);
CentroidCache read_centroid_cache(const std::filesystem::path& cache_dir);
void attach_centroids(std::vector<DatasetItem>& items, const CentroidCache& cache);

struct PatchTuple {
  Image hr;
  Image lr;
  Image centroid;  // empty when the item has none
};

// LR patch at a uniformly random valid offset (or the forced one); HR and
// centroid crops are the aligned s*patch regions.
PatchTuple sample_patch(const DatasetItem& item, int scale, int lr_patch, Rng& rng,
                        std::optional<std::pair<int, int>> forced_offset = std::nullopt);

// Dihedral transform k in [0, 8): bit 2 = transpose, bit 1 = vertical flip,
// bit 0 = horizontal flip (applied in that order).
Image dihedral(const Image& img, int k);
PatchTuple augment(const PatchTuple& tuple, Rng& rng);
PatchTuple augment_with(const PatchTuple& tuple, int k);

enum class ScheduleKind { kConstant, kLinearRamp, kStep, kCosineRamp };

struct AlphaSchedule {
  ScheduleKind kind = ScheduleKind::kLinearRamp;
  double ramp_end_fraction = 0.5;
  double alpha_start = 0.0;
  double alpha_end = 1.0;

  void validate() const;
};

std::string to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(const std::string& name);

// Constant schedules hold alpha_start.
double alpha_at(const AlphaSchedule& schedule, long step, long total_steps);

struct SampleRef {
  std::size_t item = 0;
  std::uint64_t stream = 0;  // seeds the per-sample offset/augmentation draws
};

// Reproducible batch plan: global sample k = step * batch + j walks a fresh
// seeded permutation of the items every epoch.
class BatchSampler {
 public:
  BatchSampler(std::uint64_t seed, std::size_t n_items, int batch_size);

  std::vector<SampleRef> batch(long step);

 private:
  const std::vector<std::size_t>& permutation(std::uint64_t epoch);

  std::uint64_t seed_;
  std::size_t n_items_;
  int batch_size_;
  std::uint64_t cached_epoch_ = UINT64_MAX;
  std::vector<std::size_t> cached_perm_;
};

}  // namespace eco
