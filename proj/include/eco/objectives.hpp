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

#include <string>

#include "eco/image.hpp"
#include "eco/resample.hpp"

namespace eco {

enum class ObjectiveMode { kVanilla, kKd, kEco, kResidualRegression };

std::string to_string(ObjectiveMode mode);
ObjectiveMode parse_objective(const std::string& name);

struct TrainingPair {
  Image input;
  Image target;
  float alpha = 1.0f;
  ObjectiveMode mode = ObjectiveMode::kVanilla;
};

// (x, y*). Target extents must be exactly s times the input extents.
TrainingPair vanilla_pair(const Image& x, const Image& y_star, int scale);

// (x, mu_emp): noise-free target but the input is the original LR, so
// downsampling the target need not reproduce the input.
TrainingPair kd_pair(const Image& x, const Image& mu_emp, int scale);

// Blended target t = mu_emp + alpha (y* - mu_emp), input = resize(t) per
// spec. Blending always precedes downsampling, so the pair is spatially
// consistent for every alpha.
TrainingPair eco_pair(const Image& y_star, const Image& mu_emp, float alpha, const ResizeSpec& spec);

// Target encodes the residual y* - mu_emp affinely into [0, 1].
TrainingPair residual_pair(const Image& x, const Image& y_star, const Image& mu_emp, int scale);
Image encode_residual(const Image& y_star, const Image& mu_emp);
Image decode_residual(const Image& prediction, const Image& mu_emp);

// Mean absolute value of resize(target) - input.
double spatial_consistency_residual(const TrainingPair& pair, const ResizeSpec& spec);

}  // namespace eco
