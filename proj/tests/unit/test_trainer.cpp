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

#include <doctest.h>

#include "eco/error.hpp"
#include "eco/trainer.hpp"
#include "support.hpp"

using namespace eco;

namespace {

std::vector<DatasetItem> toy_items(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DatasetItem> items;
  for (int i = 0; i < n; ++i) {
    DatasetItem item{"i" + std::to_string(i), eco::testing::random_image(rng, 16, 16, 3), Image(), Image()};
    item.lr = resize(item.hr, ResizeSpec::downscale(2));
    items.push_back(std::move(item));
  }
  return items;
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.total_steps = 12;
  c.batch_size = 2;
  c.lr0 = 1e-3;
  c.lr_patch = 6;
  c.eval_every = 4;
  c.probe_every = 3;
  c.probe_etas = {1e-4, 1e-3};
  return c;
}

}  // namespace

TEST_CASE("adam first step moves each weight by lr against its gradient sign") {
  Model m = Model::init(ModelConfig{1, 1, 0, 1.0f}, 0);
  const std::vector<float> before = m.flat_values();
  for (const auto& p : m.params()) {
    Tensor& g = p.node->grad();
    for (std::size_t i = 0; i < g.numel(); ++i) g[i] = (i % 2 ? 0.5f : -2.0f);
  }
  AdamState state = AdamState::for_model(m);
  adam_step(m, state, 0.01);
  const std::vector<float> after = m.flat_values();
  const std::vector<float> grads = m.flat_grads();
  for (std::size_t i = 0; i < before.size(); ++i) {
    const double g = grads[i];
    const double expected = before[i] - 0.01 * g / (std::abs(g) + 1e-8);
    CHECK(after[i] == doctest::Approx(expected).epsilon(1e-5));
  }
  CHECK(state.t == 1);
}

TEST_CASE("adam second step follows the bias-corrected moments") {
  Model m = Model::zeros(ModelConfig{1, 1, 0, 1.0f});
  AdamState state = AdamState::for_model(m);
  const Var& w = m.param("head.bias");
  w->grad()[0] = 1.0f;
  adam_step(m, state, 0.1);
  w->grad()[0] = 3.0f;
  adam_step(m, state, 0.1);
  const double m2 = 0.9 * 0.1 + 0.1 * 3.0, v2 = 0.999 * 0.001 + 0.001 * 9.0;
  const double step2 = 0.1 * (m2 / (1 - 0.81)) / (std::sqrt(v2 / (1 - 0.999 * 0.999)) + 1e-8);
  CHECK(w->value()[0] == doctest::Approx(-0.1 - step2).epsilon(1e-5));
}

TEST_CASE("adam rejects non-finite gradients") {
  Model m = Model::zeros(ModelConfig{1, 1, 0, 1.0f});
  AdamState state = AdamState::for_model(m);
  m.param("tail.weight")->grad()[3] = std::nanf("");
  try {
    adam_step(m, state, 0.1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNumeric);
    CHECK(std::string(e.what()).find("tail.weight") != std::string::npos);
  }
  CHECK(m.param("head.bias")->value()[0] == 0.0f);
}

TEST_CASE("cosine schedule endpoints") {
  CHECK(cosine_lr(0, 100, 0.2) == doctest::Approx(0.2));
  CHECK(cosine_lr(50, 100, 0.2) == doctest::Approx(0.1));
  CHECK(cosine_lr(100, 100, 0.2) == doctest::Approx(0.0));
  CHECK_THROWS_AS(cosine_lr(101, 100, 0.2), Error);
}

TEST_CASE("run log csv formatting") {
  RunLogRow a;
  a.step = 3;
  a.alpha = 0.5;
  a.train_loss = 0.25;
  a.lr = 1e-3;
  RunLogRow b;
  b.step = 4;
  b.val_psnr = kPsnrInfinity;
  b.val_ssim = 1.0;
  const std::string csv = run_log_csv({a, b});
  CHECK(csv ==
        "step,alpha,train_loss,lr,val_psnr,val_ssim,probe_loss_min,probe_loss_max,probe_max_grad_diff\n"
        "3,0.5,0.25,0.001,,,,,\n"
        "4,,,,99,1,,,\n");
}

TEST_CASE("evaluate on perfect reconstructions") {
  Model m = Model::zeros(ModelConfig{1, 3, 0, 1.0f});
  for (const char* name : {"head.weight", "tail.weight", "final.weight"}) {
    Tensor& k = m.param(name)->mutable_value();
    for (int c = 0; c < 3; ++c) k.at(c, c, 1, 1) = 1.0f;
  }
  Rng rng(1);
  DatasetItem item{"z", eco::testing::random_image(rng, 16, 16, 3), Image(), Image()};
  item.lr = item.hr;
  const EvalResult r = evaluate(m, {item}, 1);
  CHECK(std::isinf(r.mean_psnr));
  CHECK(r.mean_ssim == doctest::Approx(1.0));
}

TEST_CASE("training is deterministic and stops on a prefix") {
  const std::vector<DatasetItem> items = toy_items(3, 2);
  const ResizeSpec spec = ResizeSpec::downscale(2);
  TrainConfig c = tiny_config();
  auto run = [&](const TrainConfig& cfg) {
    Model m = Model::init(ModelConfig{2, 4, 1, 1.0f}, 3);
    TrainResult r = train(m, cfg, make_pair_source(cfg, items, 2, spec), &items, 2);
    return std::make_pair(m.flat_values(), r);
  };
  const auto [w1, r1] = run(c);
  const auto [w2, r2] = run(c);
  CHECK(w1 == w2);
  CHECK(run_log_csv(r1.log) == run_log_csv(r2.log));
  CHECK(r1.step_losses.size() == 12);
  CHECK(r1.probes.size() == 4);
  CHECK(r1.log.front().step == 0);
  CHECK(r1.log.back().step == 12);

  c.stop_at = 6;
  const auto [w3, r3] = run(c);
  CHECK(r3.step_losses.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(r3.step_losses[i] == r1.step_losses[i]);
}

TEST_CASE("training loss decreases on a fixed batch") {
  const std::vector<DatasetItem> items = toy_items(2, 4);
  TrainConfig c = tiny_config();
  c.total_steps = 150;
  c.probe_every = 0;
  c.eval_every = 0;
  c.augment = false;
  const PairSource fixed = [&](long, double) {
    return std::vector<TrainingPair>{vanilla_pair(items[0].lr, items[0].hr, 2)};
  };
  Model m = Model::init(ModelConfig{2, 4, 1, 1.0f}, 3);
  const TrainResult r = train(m, c, fixed, nullptr, 2);
  CHECK(r.step_losses.back() < 0.5f * r.step_losses.front());
}

TEST_CASE("non-vanilla objectives need centroids") {
  const std::vector<DatasetItem> items = toy_items(2, 5);
  TrainConfig c = tiny_config();
  c.objective = ObjectiveMode::kEco;
  try {
    make_pair_source(c, items, 2, ResizeSpec::downscale(2));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("gen-centroids") != std::string::npos);
  }
}

TEST_CASE("eco pairs follow the alpha schedule") {
  std::vector<DatasetItem> items = toy_items(2, 6);
  for (auto& item : items) item.centroid = Image(item.hr.height(), item.hr.width(), 3, 0.5f);
  TrainConfig c = tiny_config();
  c.objective = ObjectiveMode::kEco;
  c.augment = false;
  const PairSource pairs = make_pair_source(c, items, 2, ResizeSpec::downscale(2));
  for (const auto& p : pairs(0, 0.0)) {
    for (float v : p.target.data()) CHECK(v == 0.5f);
  }
  Model m = Model::init(ModelConfig{2, 4, 1, 1.0f}, 3);
  const TrainResult r = train(m, c, pairs, nullptr, 2);
  CHECK(r.log.front().alpha == 0.0);
  CHECK(r.log[1].alpha == doctest::Approx(alpha_at(c.alpha, r.log[1].step, c.total_steps)));
}

TEST_CASE("train config validation") {
  TrainConfig c;
  c.total_steps = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = TrainConfig{};
  c.stop_at = 5000;
  CHECK_THROWS_AS(c.validate(), Error);
}
