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

#include "eco/objectives.hpp"

#include "eco/error.hpp"

namespace eco {

namespace {

void check_scale(const Image& lr, const Image& hr, int scale, const char* what) {
  require(scale >= 1, ErrorCode::kInvalidArgument, "scale must be >= 1");
  if (hr.height() % scale != 0 || hr.width() % scale != 0) {
    fail(ErrorCode::kShape, std::string(what) + ": target " + std::to_string(hr.height()) + "x" +
                                std::to_string(hr.width()) + " not divisible by scale " +
                                std::to_string(scale));
  }
  if (lr.height() * scale != hr.height() || lr.width() * scale != hr.width() ||
      lr.channels() != hr.channels()) {
    fail(ErrorCode::kShape, std::string(what) + ": input " + std::to_string(lr.height()) + "x" +
                                std::to_string(lr.width()) + " is not target / " +
                                std::to_string(scale));
  }
}

}  // namespace

std::string to_string(ObjectiveMode mode) {
  switch (mode) {
    case ObjectiveMode::kVanilla: return "vanilla";
    case ObjectiveMode::kKd: return "kd";
    case ObjectiveMode::kEco: return "eco";
    case ObjectiveMode::kResidualRegression: return "residual";
  }
  return "unknown";
}

ObjectiveMode parse_objective(const std::string& name) {
  if (name == "vanilla") return ObjectiveMode::kVanilla;
  if (name == "kd") return ObjectiveMode::kKd;
  if (name == "eco") return ObjectiveMode::kEco;
  if (name == "residual") return ObjectiveMode::kResidualRegression;
  fail(ErrorCode::kConfig, "unknown objective '" + name + "' (expected vanilla|kd|eco|residual)");
}

TrainingPair vanilla_pair(const Image& x, const Image& y_star, int scale) {
  check_scale(x, y_star, scale, "vanilla_pair");
  return {x, y_star, 1.0f, ObjectiveMode::kVanilla};
}

TrainingPair kd_pair(const Image& x, const Image& mu_emp, int scale) {
  require(!mu_emp.empty(), ErrorCode::kState, "kd_pair: missing centroid for item");
  check_scale(x, mu_emp, scale, "kd_pair");
  return {x, mu_emp, 0.0f, ObjectiveMode::kKd};
}

TrainingPair eco_pair(const Image& y_star, const Image& mu_emp, float alpha, const ResizeSpec& spec) {
  require(y_star.same_extents(mu_emp), ErrorCode::kShape, "eco_pair: y* and mu_emp extents differ");
  require(alpha >= 0.0f && alpha <= 1.0f, ErrorCode::kInvalidArgument, "eco_pair: alpha outside [0,1]");
  Image target = lerp(mu_emp, y_star, alpha);
  Image input = resize(target, spec);
  return {std::move(input), std::move(target), alpha, ObjectiveMode::kEco};
}

Image encode_residual(const Image& y_star, const Image& mu_emp) {
  Image out = subtract(y_star, mu_emp);
  for (float& v : out.data()) v = 0.5f + 0.5f * v;
  return out;
}

Image decode_residual(const Image& prediction, const Image& mu_emp) {
  require(prediction.same_extents(mu_emp), ErrorCode::kShape, "decode_residual: extent mismatch");
  Image out = mu_emp;
  auto o = out.data();
  auto p = prediction.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += 2.0f * (p[i] - 0.5f);
  return out;
}

TrainingPair residual_pair(const Image& x, const Image& y_star, const Image& mu_emp, int scale) {
  check_scale(x, y_star, scale, "residual_pair");
  return {x, encode_residual(y_star, mu_emp), 1.0f, ObjectiveMode::kResidualRegression};
}

double spatial_consistency_residual(const TrainingPair& pair, const ResizeSpec& spec) {
  return mean_abs_diff(resize(pair.target, spec), pair.input);
}

}  // namespace eco
