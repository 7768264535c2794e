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

#include <span>
#include <string>
#include <vector>

#include "eco/model.hpp"
#include "eco/objectives.hpp"

namespace eco {

enum class LossKind { kL1, kL2 };

std::string to_string(LossKind kind);
LossKind parse_loss(const std::string& name);

// Stacked NCHW input/target tensors for one minibatch.
struct Batch {
  Tensor input;
  Tensor target;
};

Batch make_batch(std::span<const TrainingPair> pairs);

struct LossEval {
  float loss = 0.0f;
  std::vector<float> grad;  // flattened in parameter order; empty unless requested
};

// Forward + loss, optionally backward. Parameter gradients are zeroed
// before accumulation.
LossEval evaluate_loss(Model& model, const Batch& batch, LossKind kind, bool with_grad);

}  // namespace eco
