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

#include "eco/model.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "eco/error.hpp"
#include "eco/io.hpp"
#include "eco/rng.hpp"

namespace eco {

namespace fs = std::filesystem;
using nlohmann::json;

void ModelConfig::validate() const {
  require(scale >= 1, ErrorCode::kConfig, "model.scale must be >= 1");
  require(channels >= 1, ErrorCode::kConfig, "model.channels must be >= 1");
  require(n_blocks >= 0, ErrorCode::kConfig, "model.n_blocks must be >= 0");
  require(std::isfinite(residual_scaling), ErrorCode::kConfig, "model.residual_scaling must be finite");
}

std::vector<std::pair<std::string, Shape>> model_layout(const ModelConfig& config) {
  config.validate();
  const int c = config.channels;
  const int s2 = config.scale * config.scale;
  std::vector<std::pair<std::string, Shape>> layout;
  auto conv = [&](const std::string& name, int out, int in) {
    layout.emplace_back(name + ".weight", Shape{out, in, 3, 3});
    layout.emplace_back(name + ".bias", Shape{out});
  };
  conv("head", c, 3);
  for (int b = 0; b < config.n_blocks; ++b) {
    conv("block" + std::to_string(b) + ".conv1", c, c);
    conv("block" + std::to_string(b) + ".conv2", c, c);
  }
  conv("body", c, c);
  conv("tail", 3 * s2, c);
  conv("final", 3, 3);
  return layout;
}

Model::Model(ModelConfig config, std::vector<NamedParam> params)
    : config_(config), params_(std::move(params)) {
  const auto layout = model_layout(config_);
  require(layout.size() == params_.size(), ErrorCode::kShape, "parameter list does not match topology");
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (params_[i].name != layout[i].first || params_[i].node->shape() != layout[i].second) {
      fail(ErrorCode::kShape, "parameter " + params_[i].name + " " +
                                  shape_to_string(params_[i].node->shape()) + " does not match expected " +
                                  layout[i].first + " " + shape_to_string(layout[i].second));
    }
  }
}

Model Model::init(const ModelConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<NamedParam> params;
  for (auto& [name, shape] : model_layout(config)) {
    Tensor t(shape, 0.0f);
    if (shape.size() == 4) {
      const double bound = std::sqrt(1.0 / (shape[1] * shape[2] * shape[3]));
      for (float& v : t.data()) v = static_cast<float>(rng.uniform(-bound, bound));
    }
    params.push_back({name, parameter(std::move(t))});
  }
  return Model(config, std::move(params));
}

Model Model::zeros(const ModelConfig& config) {
  std::vector<NamedParam> params;
  for (auto& [name, shape] : model_layout(config)) params.push_back({name, parameter(Tensor(shape, 0.0f))});
  return Model(config, std::move(params));
}

std::vector<Var> Model::parameter_vars() const {
  std::vector<Var> vars;
  vars.reserve(params_.size());
  for (const auto& p : params_) vars.push_back(p.node);
  return vars;
}

const Var& Model::param(std::string_view name) const {
  for (const auto& p : params_) {
    if (p.name == name) return p.node;
  }
  fail(ErrorCode::kInvalidArgument, "no parameter named " + std::string(name));
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.node->value().numel();
  return n;
}

Model Model::clone() const {
  std::vector<NamedParam> params;
  params.reserve(params_.size());
  for (const auto& p : params_) params.push_back({p.name, parameter(p.node->value())});
  return Model(config_, std::move(params));
}

Var Model::forward(const Var& input) const {
  if (input->value().rank() != 4 || input->shape()[1] != 3) {
    fail(ErrorCode::kShape, "model input must be N x 3 x H x W, got " + shape_to_string(input->shape()));
  }
  std::size_t i = 0;
  auto next_conv = [&](const Var& x) {
    const Var& w = params_[i].node;
    const Var& b = params_[i + 1].node;
    i += 2;
    return conv2d(x, w, b);
  };
  const Var head = next_conv(input);
  Var x = head;
  for (int b = 0; b < config_.n_blocks; ++b) {
    Var r = next_conv(relu(next_conv(x)));
    if (config_.residual_scaling != 1.0f) r = scale(r, config_.residual_scaling);
    x = add(x, r);
  }
  x = add(next_conv(x), head);
  x = pixel_shuffle(next_conv(x), config_.scale);
  return next_conv(x);
}

Image Model::infer(const Image& lr) const {
  NoGradGuard guard;
  const Var out = forward(constant(images_to_tensor(std::span<const Image>(&lr, 1))));
  return tensor_to_image(out->value(), 0);
}

std::vector<float> Model::flat_values() const {
  std::vector<float> flat;
  flat.reserve(parameter_count());
  for (const auto& p : params_) {
    auto d = p.node->value().data();
    flat.insert(flat.end(), d.begin(), d.end());
  }
  return flat;
}

std::vector<float> Model::flat_grads() const {
  std::vector<float> flat;
  flat.reserve(parameter_count());
  for (const auto& p : params_) {
    auto d = p.node->grad().data();
    flat.insert(flat.end(), d.begin(), d.end());
  }
  return flat;
}

void Model::assign_flat_values(std::span<const float> values) {
  require(values.size() == parameter_count(), ErrorCode::kShape, "flat parameter length mismatch");
  std::size_t offset = 0;
  for (auto& p : params_) {
    auto d = p.node->mutable_value().data();
    std::copy(values.begin() + static_cast<std::ptrdiff_t>(offset),
              values.begin() + static_cast<std::ptrdiff_t>(offset + d.size()), d.begin());
    offset += d.size();
  }
}

void Model::zero_grad() {
  for (auto& p : params_) p.node->zero_grad();
}

bool Model::same_values(const Model& other) const {
  if (!(config_ == other.config_) || params_.size() != other.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!(params_[i].node->value() == other.params_[i].node->value())) return false;
  }
  return true;
}

fs::path checkpoint_sidecar(const fs::path& path) {
  fs::path p = path;
  p += ".json";
  return p;
}

void save_checkpoint(const fs::path& path, const Model& model, long step) {
  std::ostringstream weights;
  json params = json::array();
  for (const auto& p : model.params()) {
    const Tensor& t = p.node->value();
    const auto lead = static_cast<std::uint32_t>(t.dim(0));
    const auto rest = static_cast<std::uint32_t>(t.numel() / t.dim(0));
    write_ecot_record(weights, lead, rest, 1, t.data());
    params.push_back({{"name", p.name}, {"shape", t.shape()}});
  }
  const ModelConfig& c = model.config();
  const json sidecar = {
      {"format", "eco-checkpoint/1"},
      {"step", step},
      {"model",
       {{"scale", c.scale}, {"channels", c.channels}, {"n_blocks", c.n_blocks},
        {"residual_scaling", c.residual_scaling}}},
      {"params", params},
  };
  const std::string bytes = weights.str();
  write_file_atomic(path, bytes);
  const std::string meta = sidecar.dump(2) + "\n";
  write_file_atomic(checkpoint_sidecar(path), meta);
}

std::string checkpoint_hash(const fs::path& path) { return sha256_hex(read_file(path)); }

Checkpoint load_checkpoint(const fs::path& path) {
  const fs::path meta_path = checkpoint_sidecar(path);
  if (!fs::exists(path) || !fs::exists(meta_path)) {
    fail(ErrorCode::kIo, "checkpoint " + path.string() + " (or its .json sidecar) not found");
  }
  json meta;
  try {
    std::ifstream in(meta_path);
    meta = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kIo, "malformed checkpoint sidecar " + meta_path.string() + ": " + e.what());
  }
  ModelConfig config;
  try {
    const auto& m = meta.at("model");
    config.scale = m.at("scale").get<int>();
    config.channels = m.at("channels").get<int>();
    config.n_blocks = m.at("n_blocks").get<int>();
    config.residual_scaling = m.at("residual_scaling").get<float>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kIo, "checkpoint sidecar missing model config: " + std::string(e.what()));
  }
  const auto bytes = read_file(path);
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  std::vector<NamedParam> params;
  for (auto& [name, shape] : model_layout(config)) {
    EcotRecord rec = read_ecot_record(in);
    if (static_cast<int>(rec.height) != shape[0] || rec.values.size() != shape_numel(shape)) {
      fail(ErrorCode::kIo, "checkpoint record for " + name + " has unexpected extents");
    }
    params.push_back({name, parameter(Tensor(shape, std::move(rec.values)))});
  }
  Checkpoint ckpt{Model(config, std::move(params)), meta.value("step", 0L), sha256_hex(bytes)};
  return ckpt;
}

}  // namespace eco
