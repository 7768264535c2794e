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
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "eco/analysis.hpp"
#include "eco/batch.hpp"
#include "eco/model.hpp"
#include "eco/objectives.hpp"
#include "eco/pipeline.hpp"

namespace eco {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<std::vector<float>> m;
  std::vector<std::vector<float>> v;
  long t = 0;

  static AdamState for_model(const Model& model);
};

// One bias-corrected Adam update from the gradients currently stored on the
// model's parameters. A non-finite gradient aborts before any parameter is
// touched.
void adam_step(Model& model, AdamState& state, double lr, const AdamConfig& config = {});

// lr0 * (1 + cos(pi * step / total)) / 2
double cosine_lr(long step, long total, double lr0);

struct TrainConfig {
  long total_steps = 2000;
  int batch_size = 16;
  double lr0 = 1e-4;
  AdamConfig adam;
  LossKind loss = LossKind::kL1;
  ObjectiveMode objective = ObjectiveMode::kVanilla;
  AlphaSchedule alpha;
  std::uint64_t seed = 0;
  int lr_patch = 48;
  bool augment = true;
  long eval_every = 100;
  long probe_every = 0;  // 0 disables the landscape probe
  long probe_until = -1;  // last step probed; -1 = whole run
  std::vector<double> probe_etas;  // empty: default grid around lr0
  long checkpoint_every = 0;
  // Stop after this many updates of the total_steps schedule (-1: run it
  // all). A stopped run is a bitwise prefix of the full one.
  long stop_at = -1;

  void validate() const;
};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct RunLogRow {
  long step = 0;
  double alpha = kMissing;
  double train_loss = kMissing;
  double lr = kMissing;
  double val_psnr = kMissing;
  double val_ssim = kMissing;
  double probe_loss_min = kMissing;
  double probe_loss_max = kMissing;
  double probe_max_grad_diff = kMissing;
};

std::string run_log_csv(const std::vector<RunLogRow>& rows);

struct EvalItem {
  std::string id;
  double psnr = 0.0;
  double ssim = 0.0;
};

struct EvalResult {
  std::vector<EvalItem> items;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
};

// SR is clamped to [0, 1] and compared on Y with a `scale`-pixel border
// dropped. With `residual_targets` the prediction is decoded against the
// item centroid first.
EvalResult evaluate(const Model& model, const std::vector<DatasetItem>& items, int scale,
                    bool residual_targets = false);

// Builds the pairs for one step.
using PairSource = std::function<std::vector<TrainingPair>(long step, double alpha)>;

PairSource make_pair_source(const TrainConfig& config, const std::vector<DatasetItem>& items, int scale,
                            const ResizeSpec& spec);

struct TrainHooks {
  std::function<void(const Model&, long step)> checkpoint;
  std::function<void(const RunLogRow&)> row;
  std::function<void(const ProbeReport&)> probe;
};

struct TrainResult {
  std::vector<RunLogRow> log;
  std::vector<float> step_losses;  // one per update
  std::vector<ProbeReport> probes;
};

// Runs total_steps updates of `model` in place. Validation and probe rows
// describe the parameters before the update of that step; the final row
// (step == total_steps) evaluates the trained model.
TrainResult train(Model& model, const TrainConfig& config, const PairSource& pairs,
                  const std::vector<DatasetItem>* val_items, int scale, const TrainHooks& hooks = {});

}  // namespace eco
