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

#include "eco/autodiff.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <unordered_set>

#include "eco/error.hpp"

namespace eco {

namespace {

using RowMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMatrix>;
using ConstMatMap = Eigen::Map<const RowMatrix>;

struct ConvGeometry {
  int n, c, h, w, o, k, pad;
};

ConvGeometry conv_geometry(const Shape& x, const Shape& kernel, const Shape* bias) {
  if (x.size() != 4) fail(ErrorCode::kShape, "conv2d input must be NCHW, got " + shape_to_string(x));
  if (kernel.size() != 4) {
    fail(ErrorCode::kShape, "conv2d kernel must be OIKhKw, got " + shape_to_string(kernel));
  }
  if (kernel[2] != kernel[3] || kernel[2] % 2 == 0) {
    fail(ErrorCode::kShape, "conv2d kernel must be square with odd size, got " +
                                shape_to_string(kernel));
  }
  if (x[1] != kernel[1]) {
    fail(ErrorCode::kShape, "conv2d channel mismatch: input " + shape_to_string(x) +
                                " vs kernel " + shape_to_string(kernel));
  }
  if (bias && (bias->size() != 1 || (*bias)[0] != kernel[0])) {
    fail(ErrorCode::kShape, "conv2d bias must have length " + std::to_string(kernel[0]) +
                                ", got " + shape_to_string(*bias));
  }
  return {x[0], x[1], x[2], x[3], kernel[0], kernel[2], (kernel[2] - 1) / 2};
}

// Column buffer (C*K*K) x (H*W) for one image.
void im2col(const float* img, const ConvGeometry& g, float* cols) {
  const int hw = g.h * g.w;
  for (int c = 0; c < g.c; ++c) {
    const float* plane = img + static_cast<std::size_t>(c) * hw;
    for (int ky = 0; ky < g.k; ++ky) {
      const int dy = ky - g.pad;
      for (int kx = 0; kx < g.k; ++kx) {
        const int dx = kx - g.pad;
        float* row = cols + static_cast<std::size_t>((c * g.k + ky) * g.k + kx) * hw;
        const int x0 = std::max(0, -dx), x1 = std::min(g.w, g.w - dx);
        for (int y = 0; y < g.h; ++y) {
          float* dst = row + static_cast<std::size_t>(y) * g.w;
          const int sy = y + dy;
          if (sy < 0 || sy >= g.h || x0 >= x1) {
            std::fill(dst, dst + g.w, 0.0f);
            continue;
          }
          const float* src = plane + static_cast<std::size_t>(sy) * g.w + dx;
          std::fill(dst, dst + x0, 0.0f);
          std::copy(src + x0, src + x1, dst + x0);
          std::fill(dst + x1, dst + g.w, 0.0f);
        }
      }
    }
  }
}

void col2im_add(const float* cols, const ConvGeometry& g, float* img) {
  const int hw = g.h * g.w;
  for (int c = 0; c < g.c; ++c) {
    float* plane = img + static_cast<std::size_t>(c) * hw;
    for (int ky = 0; ky < g.k; ++ky) {
      const int dy = ky - g.pad;
      for (int kx = 0; kx < g.k; ++kx) {
        const int dx = kx - g.pad;
        const float* row = cols + static_cast<std::size_t>((c * g.k + ky) * g.k + kx) * hw;
        const int x0 = std::max(0, -dx), x1 = std::min(g.w, g.w - dx);
        for (int y = 0; y < g.h; ++y) {
          const int sy = y + dy;
          if (sy < 0 || sy >= g.h) continue;
          const float* src = row + static_cast<std::size_t>(y) * g.w;
          float* dst = plane + static_cast<std::size_t>(sy) * g.w + dx;
          for (int x = x0; x < x1; ++x) dst[x] += src[x];
        }
      }
    }
  }
}

void accumulate(Tensor& into, const Tensor& from) {
  float* d = into.raw();
  const float* s = from.raw();
  for (std::size_t i = 0; i < into.numel(); ++i) d[i] += s[i];
}

bool any_requires_grad(const std::vector<Var>& vars) {
  return std::any_of(vars.begin(), vars.end(),
                     [](const Var& v) { return v && v->requires_grad(); });
}

void check_loss_shapes(const Node& pred, const Tensor& target, const char* name) {
  if (pred.shape() != target.shape()) {
    fail(ErrorCode::kShape, std::string(name) + " shape mismatch: prediction " +
                                shape_to_string(pred.shape()) + " vs target " +
                                shape_to_string(target.shape()));
  }
}

thread_local bool g_grad_disabled = false;

}  // namespace

NoGradGuard::NoGradGuard() : previous_(g_grad_disabled) { g_grad_disabled = true; }
NoGradGuard::~NoGradGuard() { g_grad_disabled = previous_; }

Node::Node(Tensor value, bool requires_grad, std::string op)
    : value_(std::move(value)), requires_grad_(requires_grad), op_(std::move(op)) {}

Tensor& Node::grad() {
  if (grad_.empty() && !value_.empty()) grad_ = Tensor(value_.shape(), 0.0f);
  return grad_;
}

const Tensor& Node::grad() const {
  if (grad_.empty() && !value_.empty()) grad_ = Tensor(value_.shape(), 0.0f);
  return grad_;
}

void Node::zero_grad() {
  if (!grad_.empty()) grad_.fill(0.0f);
}

Var parameter(Tensor value) { return std::make_shared<Node>(std::move(value), true, "parameter"); }

Var constant(Tensor value) { return std::make_shared<Node>(std::move(value), false, "constant"); }

Var make_node(Tensor value, std::vector<Var> parents, std::string op,
              std::function<void(Node&)> backward_rule) {
  const bool needs = !g_grad_disabled && any_requires_grad(parents);
  auto node = std::make_shared<Node>(std::move(value), needs, std::move(op));
  if (needs) {
    node->parents_ = std::move(parents);
    node->backward_rule_ = std::move(backward_rule);
  }
  return node;
}

Tensor conv2d_forward(const Tensor& x, const Tensor& kernel, const Tensor* bias) {
  const ConvGeometry g = conv_geometry(x.shape(), kernel.shape(), bias ? &bias->shape() : nullptr);
  const int hw = g.h * g.w;
  const int ckk = g.c * g.k * g.k;
  Tensor out({g.n, g.o, g.h, g.w});
  FloatBuffer cols(static_cast<std::size_t>(ckk) * hw);
  ConstMatMap wmat(kernel.raw(), g.o, ckk);
  for (int n = 0; n < g.n; ++n) {
    im2col(x.raw() + static_cast<std::size_t>(n) * g.c * hw, g, cols.data());
    MatMap result(out.raw() + static_cast<std::size_t>(n) * g.o * hw, g.o, hw);
    result.noalias() = wmat * ConstMatMap(cols.data(), ckk, hw);
    if (bias) {
      for (int o = 0; o < g.o; ++o) result.row(o).array() += (*bias)[o];
    }
  }
  return out;
}

Var conv2d(const Var& x, const Var& kernel, const Var& bias) {
  Tensor out = conv2d_forward(x->value(), kernel->value(), bias ? &bias->value() : nullptr);
  return make_node(std::move(out), {x, kernel, bias}, "conv2d", [x, kernel, bias](Node& self) {
    const ConvGeometry g = conv_geometry(x->shape(), kernel->shape(), nullptr);
    const int hw = g.h * g.w;
    const int ckk = g.c * g.k * g.k;
    const Tensor& gout = self.grad();
    FloatBuffer cols(static_cast<std::size_t>(ckk) * hw);
    FloatBuffer gcols(x->requires_grad() ? cols.size() : 0);
    ConstMatMap wmat(kernel->value().raw(), g.o, ckk);
    for (int n = 0; n < g.n; ++n) {
      ConstMatMap gmat(gout.raw() + static_cast<std::size_t>(n) * g.o * hw, g.o, hw);
      if (kernel->requires_grad()) {
        im2col(x->value().raw() + static_cast<std::size_t>(n) * g.c * hw, g, cols.data());
        MatMap gw(kernel->grad().raw(), g.o, ckk);
        gw.noalias() += gmat * ConstMatMap(cols.data(), ckk, hw).transpose();
      }
      if (bias && bias->requires_grad()) {
        float* gb = bias->grad().raw();
        for (int o = 0; o < g.o; ++o) gb[o] += gmat.row(o).sum();
      }
      if (x->requires_grad()) {
        MatMap gc(gcols.data(), ckk, hw);
        gc.noalias() = wmat.transpose() * gmat;
        col2im_add(gcols.data(), g, x->grad().raw() + static_cast<std::size_t>(n) * g.c * hw);
      }
    }
  });
}

Var relu(const Var& x) {
  Tensor out = x->value();
  for (float& v : out.data()) v = v > 0.0f ? v : 0.0f;
  return make_node(std::move(out), {x}, "relu", [x](Node& self) {
    const float* in = x->value().raw();
    const float* g = self.grad().raw();
    float* gx = x->grad().raw();
    for (std::size_t i = 0; i < self.value().numel(); ++i) {
      if (in[i] > 0.0f) gx[i] += g[i];
    }
  });
}

Var add(const Var& a, const Var& b) {
  if (a->shape() != b->shape()) {
    fail(ErrorCode::kShape, "add shape mismatch: " + shape_to_string(a->shape()) + " vs " +
                                shape_to_string(b->shape()));
  }
  Tensor out = a->value();
  const float* bv = b->value().raw();
  float* o = out.raw();
  for (std::size_t i = 0; i < out.numel(); ++i) o[i] += bv[i];
  return make_node(std::move(out), {a, b}, "add", [a, b](Node& self) {
    if (a->requires_grad()) accumulate(a->grad(), self.grad());
    if (b->requires_grad()) accumulate(b->grad(), self.grad());
  });
}

Var scale(const Var& x, float factor) {
  Tensor out = x->value();
  for (float& v : out.data()) v *= factor;
  return make_node(std::move(out), {x}, "scale", [x, factor](Node& self) {
    const float* g = self.grad().raw();
    float* gx = x->grad().raw();
    for (std::size_t i = 0; i < self.value().numel(); ++i) gx[i] += factor * g[i];
  });
}

Tensor pixel_shuffle_forward(const Tensor& x, int s) {
  if (x.rank() != 4) fail(ErrorCode::kShape, "pixel_shuffle input must be NCHW");
  if (s < 1) fail(ErrorCode::kInvalidArgument, "pixel_shuffle scale must be >= 1");
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  if (c % (s * s) != 0) {
    fail(ErrorCode::kShape, "pixel_shuffle channel count " + std::to_string(c) +
                                " not divisible by " + std::to_string(s * s));
  }
  const int c0 = c / (s * s);
  Tensor out({n, c0, h * s, w * s});
  for (int b = 0; b < n; ++b)
    for (int ch = 0; ch < c0; ++ch)
      for (int dy = 0; dy < s; ++dy)
        for (int dx = 0; dx < s; ++dx) {
          const int src_c = ch * s * s + dy * s + dx;
          for (int y = 0; y < h; ++y)
            for (int xx = 0; xx < w; ++xx) out.at(b, ch, s * y + dy, s * xx + dx) = x.at(b, src_c, y, xx);
        }
  return out;
}

Var pixel_shuffle(const Var& x, int s) {
  Tensor out = pixel_shuffle_forward(x->value(), s);
  return make_node(std::move(out), {x}, "pixel_shuffle", [x, s](Node& self) {
    const Tensor& g = self.grad();
    Tensor& gx = x->grad();
    const int n = gx.dim(0), c0 = g.dim(1), h = gx.dim(2), w = gx.dim(3);
    for (int b = 0; b < n; ++b)
      for (int ch = 0; ch < c0; ++ch)
        for (int dy = 0; dy < s; ++dy)
          for (int dx = 0; dx < s; ++dx) {
            const int src_c = ch * s * s + dy * s + dx;
            for (int y = 0; y < h; ++y)
              for (int xx = 0; xx < w; ++xx) gx.at(b, src_c, y, xx) += g.at(b, ch, s * y + dy, s * xx + dx);
          }
  });
}

Var reshape(const Var& x, Shape shape) {
  Tensor out = x->value().reshaped(std::move(shape));
  return make_node(std::move(out), {x}, "reshape", [x](Node& self) {
    const float* g = self.grad().raw();
    float* gx = x->grad().raw();
    for (std::size_t i = 0; i < self.value().numel(); ++i) gx[i] += g[i];
  });
}

Var sum(const Var& x) {
  double total = 0.0;
  for (float v : x->value().data()) total += v;
  return make_node(Tensor({1}, {static_cast<float>(total)}), {x}, "sum", [x](Node& self) {
    const float g = self.grad()[0];
    for (float& v : x->grad().data()) v += g;
  });
}

Var l1_loss(const Var& pred, const Tensor& target) {
  check_loss_shapes(*pred, target, "l1_loss");
  const std::size_t n = target.numel();
  double total = 0.0;
  const float* p = pred->value().raw();
  const float* t = target.raw();
  for (std::size_t i = 0; i < n; ++i) total += std::abs(static_cast<double>(p[i]) - t[i]);
  const float loss = static_cast<float>(total / static_cast<double>(n));
  return make_node(Tensor({1}, {loss}), {pred}, "l1_loss", [pred, target, n](Node& self) {
    const float g = self.grad()[0] / static_cast<float>(n);
    const float* p = pred->value().raw();
    const float* t = target.raw();
    float* gp = pred->grad().raw();
    for (std::size_t i = 0; i < n; ++i) {
      const float d = p[i] - t[i];
      if (d > 0.0f) gp[i] += g;
      else if (d < 0.0f) gp[i] -= g;
    }
  });
}

Var l2_loss(const Var& pred, const Tensor& target) {
  check_loss_shapes(*pred, target, "l2_loss");
  const std::size_t n = target.numel();
  double total = 0.0;
  const float* p = pred->value().raw();
  const float* t = target.raw();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(p[i]) - t[i];
    total += d * d;
  }
  const float loss = static_cast<float>(total / static_cast<double>(n));
  return make_node(Tensor({1}, {loss}), {pred}, "l2_loss", [pred, target, n](Node& self) {
    const float g = 2.0f * self.grad()[0] / static_cast<float>(n);
    const float* p = pred->value().raw();
    const float* t = target.raw();
    float* gp = pred->grad().raw();
    for (std::size_t i = 0; i < n; ++i) gp[i] += g * (p[i] - t[i]);
  });
}

namespace {

std::vector<Node*> topological_order(Node* root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{root, 0}};
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents().size()) {
      Node* parent = node->parents()[next++].get();
      if (parent && parent->requires_grad() && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;  // parents before children
}

}  // namespace

void backward(const Var& loss) {
  require(loss != nullptr, ErrorCode::kInvalidArgument, "backward on null node");
  if (loss->value().numel() != 1) {
    fail(ErrorCode::kShape, "backward requires a scalar root, got shape " +
                                shape_to_string(loss->shape()));
  }
  if (loss->backward_done_) {
    fail(ErrorCode::kState, "backward already run on this graph; call reset_graph first");
  }
  loss->backward_done_ = true;
  if (!loss->requires_grad()) return;
  const std::vector<Node*> order = topological_order(loss.get());
  loss->grad()[0] += 1.0f;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward_rule_) node->backward_rule_(*node);
  }
}

void reset_graph(const Var& root) {
  for (Node* node : topological_order(root.get())) node->zero_grad();
  root->backward_done_ = false;
}

void zero_grad(std::span<const Var> vars) {
  for (const Var& v : vars) v->zero_grad();
}

}  // namespace eco
