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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eco/autodiff.hpp"
#include "eco/image.hpp"

namespace eco {

struct ModelConfig {
  int scale = 2;
  int channels = 16;
  int n_blocks = 4;
  float residual_scaling = 1.0f;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct NamedParam {
  std::string name;
  Var node;
};

// EDSR-baseline-style reconstructor: head conv, residual blocks
// (conv-ReLU-conv + skip), body-end conv with global skip, tail conv to
// 3*s^2 channels, pixel shuffle, final 3->3 conv. ReLU is the only
// nonlinearity, so the map is piecewise linear.
class Model {
 public:
  Model(ModelConfig config, std::vector<NamedParam> params);

  static Model init(const ModelConfig& config, std::uint64_t seed);
  // Parameters with the right shapes, all zero.
  static Model zeros(const ModelConfig& config);

  const ModelConfig& config() const noexcept { return config_; }
  const std::vector<NamedParam>& params() const noexcept { return params_; }
  std::vector<Var> parameter_vars() const;
  const Var& param(std::string_view name) const;
  std::size_t parameter_count() const;

  // Deep copy: fresh parameter nodes with copied values.
  Model clone() const;

  Var forward(const Var& input) const;  // NCHW, 3 channels
  Image infer(const Image& lr) const;   // unclamped HR estimate

  std::vector<float> flat_values() const;
  std::vector<float> flat_grads() const;
  void assign_flat_values(std::span<const float> values);
  void zero_grad();

  bool same_values(const Model& other) const;

 private:
  ModelConfig config_;
  std::vector<NamedParam> params_;
};

// Parameter shapes in canonical (checkpoint) order.
std::vector<std::pair<std::string, Shape>> model_layout(const ModelConfig& config);

// Checkpoint: `path` holds one ECOT record per parameter in layout order
// (H = leading extent, W = remaining elements, C = 1); `path`.json
// carries the config, the training step and the full shapes.
void save_checkpoint(const std::filesystem::path& path, const Model& model, long step);
struct Checkpoint {
  Model model;
  long step = 0;
  std::string hash;  // sha256 of the weight file
};
Checkpoint load_checkpoint(const std::filesystem::path& path);
std::filesystem::path checkpoint_sidecar(const std::filesystem::path& path);
std::string checkpoint_hash(const std::filesystem::path& path);

}  // namespace eco
