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

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "eco/tensor.hpp"

namespace eco {

class Node;
using Var = std::shared_ptr<Node>;

// A vertex of the reverse-mode graph. The backward rule reads this node's
// gradient and accumulates into the gradients of its parents.
class Node {
 public:
  Node(Tensor value, bool requires_grad, std::string op);

  const Tensor& value() const noexcept { return value_; }
  Tensor& mutable_value() noexcept { return value_; }
  const Shape& shape() const noexcept { return value_.shape(); }
  const std::string& op() const noexcept { return op_; }
  bool requires_grad() const noexcept { return requires_grad_; }

  // Gradient buffer, zero-filled on first access.
  Tensor& grad();
  const Tensor& grad() const;
  bool has_grad() const noexcept { return !grad_.empty(); }
  void zero_grad();

  const std::vector<Var>& parents() const noexcept { return parents_; }

 private:
  friend Var make_node(Tensor, std::vector<Var>, std::string,
                       std::function<void(Node&)>);
  friend void backward(const Var&);
  friend void reset_graph(const Var&);

  Tensor value_;
  mutable Tensor grad_;
  bool requires_grad_;
  bool backward_done_ = false;
  std::string op_;
  std::vector<Var> parents_;
  std::function<void(Node&)> backward_rule_;
};

// While alive, newly created nodes record no backward rule (inference).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Graph constructors.
Var parameter(Tensor value);
Var constant(Tensor value);
Var make_node(Tensor value, std::vector<Var> parents, std::string op,
              std::function<void(Node&)> backward_rule);

// Cross-correlation, stride 1, zero padding (K-1)/2. x: NCHW, kernel:
// OIKhKw with odd square support, bias: length O (may be null).
Var conv2d(const Var& x, const Var& kernel, const Var& bias);
Var relu(const Var& x);
Var add(const Var& a, const Var& b);
Var scale(const Var& x, float factor);
Var pixel_shuffle(const Var& x, int s);
Var reshape(const Var& x, Shape shape);
Var sum(const Var& x);

// Mean absolute / mean squared error against a fixed target.
Var l1_loss(const Var& pred, const Tensor& target);
Var l2_loss(const Var& pred, const Tensor& target);

// Reverse pass from a scalar root. Rejects a second call on the same root
// until reset_graph() has been applied.
void backward(const Var& loss);
// Zeroes every gradient reachable from root and re-arms backward().
void reset_graph(const Var& root);
void zero_grad(std::span<const Var> vars);

// Forward-only kernels shared with inference paths.
Tensor conv2d_forward(const Tensor& x, const Tensor& kernel, const Tensor* bias);
Tensor pixel_shuffle_forward(const Tensor& x, int s);

}  // namespace eco
