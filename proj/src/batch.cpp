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

#include "eco/batch.hpp"

#include "eco/error.hpp"

namespace eco {

std::string to_string(LossKind kind) { return kind == LossKind::kL1 ? "l1" : "l2"; }

LossKind parse_loss(const std::string& name) {
  if (name == "l1") return LossKind::kL1;
  if (name == "l2") return LossKind::kL2;
  fail(ErrorCode::kConfig, "unknown loss '" + name + "' (expected l1|l2)");
}

Batch make_batch(std::span<const TrainingPair> pairs) {
  require(!pairs.empty(), ErrorCode::kInvalidArgument, "empty batch");
  std::vector<Image> inputs, targets;
  inputs.reserve(pairs.size());
  targets.reserve(pairs.size());
  for (const auto& p : pairs) {
    inputs.push_back(p.input);
    targets.push_back(p.target);
  }
  return {images_to_tensor(inputs), images_to_tensor(targets)};
}

LossEval evaluate_loss(Model& model, const Batch& batch, LossKind kind, bool with_grad) {
  LossEval out;
  if (!with_grad) {
    NoGradGuard guard;
    const Var pred = model.forward(constant(batch.input));
    const Var loss = kind == LossKind::kL1 ? l1_loss(pred, batch.target) : l2_loss(pred, batch.target);
    out.loss = loss->value()[0];
    return out;
  }
  model.zero_grad();
  const Var pred = model.forward(constant(batch.input));
  const Var loss = kind == LossKind::kL1 ? l1_loss(pred, batch.target) : l2_loss(pred, batch.target);
  backward(loss);
  out.loss = loss->value()[0];
  out.grad = model.flat_grads();
  return out;
}

}  // namespace eco
