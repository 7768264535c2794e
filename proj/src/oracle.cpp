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

#include "eco/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "eco/batch.hpp"
#include "eco/error.hpp"
#include "eco/trainer.hpp"

namespace eco {

Image avg_pool(const Image& y, int s) {
  require(s >= 1, ErrorCode::kInvalidArgument, "avg_pool factor must be >= 1");
  if (y.height() % s != 0 || y.width() % s != 0) {
    fail(ErrorCode::kShape, "avg_pool: " + std::to_string(y.height()) + "x" + std::to_string(y.width()) +
                                " not divisible by " + std::to_string(s));
  }
  Image out(y.height() / s, y.width() / s, y.channels());
  const double inv = 1.0 / (s * s);
  for (int oy = 0; oy < out.height(); ++oy)
    for (int ox = 0; ox < out.width(); ++ox)
      for (int c = 0; c < y.channels(); ++c) {
        double acc = 0.0;
        for (int dy = 0; dy < s; ++dy)
          for (int dx = 0; dx < s; ++dx) acc += y.at(oy * s + dy, ox * s + dx, c);
        out.at(oy, ox, c) = static_cast<float>(acc * inv);
      }
  return out;
}

Image nn_upsample(const Image& x, int s) {
  require(s >= 1, ErrorCode::kInvalidArgument, "nn_upsample factor must be >= 1");
  Image out(x.height() * s, x.width() * s, x.channels());
  for (int y = 0; y < out.height(); ++y)
    for (int xx = 0; xx < out.width(); ++xx)
      for (int c = 0; c < x.channels(); ++c) out.at(y, xx, c) = x.at(y / s, xx / s, c);
  return out;
}

PosteriorSample make_posterior(const Image& x, int scale, int k, double noise_amp, Rng& rng) {
  require(k >= 1, ErrorCode::kInvalidArgument, "posterior needs at least one sample");
  require(noise_amp >= 0.0, ErrorCode::kInvalidArgument, "noise amplitude must be >= 0");
  PosteriorSample p;
  p.scale = scale;
  p.x = x;
  const Image base = nn_upsample(x, scale);
  for (int i = 0; i < k; ++i) {
    Image v(base.height(), base.width(), base.channels());
    for (float& value : v.data()) value = static_cast<float>(rng.uniform(-noise_amp, noise_amp));
    const Image block_mean = nn_upsample(avg_pool(v, scale), scale);
    Image y = base;
    auto yd = y.data();
    auto vd = v.data();
    auto md = block_mean.data();
    for (std::size_t j = 0; j < yd.size(); ++j) yd[j] += vd[j] - md[j];
    p.samples.push_back(std::move(y));
  }
  p.mu_true = Image(base.height(), base.width(), base.channels());
  auto mu = p.mu_true.data();
  for (std::size_t j = 0; j < mu.size(); ++j) {
    double acc = 0.0;
    for (const Image& y : p.samples) acc += y.data()[j];
    mu[j] = static_cast<float>(acc / k);
  }
  for (const Image& y : p.samples) p.eps.push_back(subtract(y, p.mu_true));
  return p;
}

JensenCheck check_jensen(const PosteriorSample& sample, const Image& c) {
  require(!sample.samples.empty(), ErrorCode::kInvalidArgument, "empty posterior");
  if (!c.same_extents(sample.mu_true)) fail(ErrorCode::kShape, "check_jensen: probe point extent mismatch");
  JensenCheck r;
  for (const Image& y : sample.samples) r.lhs += mean_abs_diff(y, c);
  r.lhs /= static_cast<double>(sample.samples.size());
  r.rhs = mean_abs_diff(sample.mu_true, c);
  return r;
}

double max_abs_mean_eps(const PosteriorSample& sample) {
  double worst = 0.0;
  const std::size_t n = sample.mu_true.size();
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (const Image& e : sample.eps) acc += e.data()[j];
    worst = std::max(worst, std::abs(acc / static_cast<double>(sample.eps.size())));
  }
  return worst;
}

double mean_eps_norm(const PosteriorSample& sample) {
  if (sample.eps.empty()) return 0.0;
  double total = 0.0;
  for (const Image& e : sample.eps) total += mean_abs(e);
  return total / static_cast<double>(sample.eps.size());
}

PosteriorTrainingReport posterior_training_check(const PosteriorSample& sample,
                                                 const ModelConfig& model_config,
                                                 const PosteriorTrainingConfig& config) {
  require(model_config.scale == sample.scale, ErrorCode::kInvalidArgument,
          "model scale must match the posterior scale");
  require(config.steps > 0 && config.batch >= 1, ErrorCode::kInvalidArgument,
          "posterior training needs steps > 0 and batch >= 1");
  Model model = Model::init(model_config, config.seed);
  AdamState adam = AdamState::for_model(model);
  Rng rng(config.seed, 0x504f5354ULL);
  const Tensor input = images_to_tensor(std::vector<Image>(static_cast<std::size_t>(config.batch), sample.x));

  PosteriorTrainingReport report;
  double farthest = -1.0;
  for (std::size_t i = 0; i < sample.eps.size(); ++i) {
    const double norm = mean_abs(sample.eps[i]);
    if (norm > farthest) {
      farthest = norm;
      report.farthest_sample = i;
    }
  }

  auto record = [&](long step) {
    const double d = mean_abs_diff(model.infer(sample.x), sample.mu_true);
    report.distance_curve.emplace_back(step, d);
    return d;
  };
  report.initial_distance = record(0);
  for (long step = 0; step < config.steps; ++step) {
    std::vector<Image> targets;
    for (int b = 0; b < config.batch; ++b) targets.push_back(sample.samples[rng.below(sample.samples.size())]);
    const Batch batch{input, images_to_tensor(targets)};
    evaluate_loss(model, batch, LossKind::kL1, true);
    adam_step(model, adam, cosine_lr(step, config.steps, config.lr0));
    if ((step + 1) % config.record_every == 0 && step + 1 < config.steps) record(step + 1);
  }
  report.final_distance = record(config.steps);
  report.prediction = model.infer(sample.x);
  report.final_distance_to_farthest = mean_abs_diff(report.prediction, sample.samples[report.farthest_sample]);
  return report;
}

}  // namespace eco
