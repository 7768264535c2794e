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

#include "eco/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "eco/error.hpp"
#include "eco/resample.hpp"

namespace eco {

AdamState AdamState::for_model(const Model& model) {
  AdamState s;
  for (const auto& p : model.params()) {
    s.m.emplace_back(p.node->value().numel(), 0.0f);
    s.v.emplace_back(p.node->value().numel(), 0.0f);
  }
  return s;
}

void adam_step(Model& model, AdamState& state, double lr, const AdamConfig& config) {
  const auto& params = model.params();
  require(state.m.size() == params.size() && state.v.size() == params.size(), ErrorCode::kShape,
          "Adam state does not match the model");
  for (std::size_t i = 0; i < params.size(); ++i) {
    require(state.m[i].size() == params[i].node->value().numel(), ErrorCode::kShape,
            "Adam moment shape mismatch");
    for (float g : params[i].node->grad().data()) {
      if (!std::isfinite(g)) {
        fail(ErrorCode::kNumeric, "non-finite gradient in " + params[i].name + " at optimizer step " +
                                      std::to_string(state.t));
      }
    }
  }
  ++state.t;
  const double b1 = config.beta1, b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto values = params[i].node->mutable_value().data();
    auto grads = params[i].node->grad().data();
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double g = grads[k];
      m[k] = static_cast<float>(b1 * m[k] + (1.0 - b1) * g);
      v[k] = static_cast<float>(b2 * v[k] + (1.0 - b2) * g * g);
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      values[k] = static_cast<float>(values[k] - lr * m_hat / (std::sqrt(v_hat) + config.eps));
    }
  }
}

double cosine_lr(long step, long total, double lr0) {
  require(total > 0 && step >= 0 && step <= total, ErrorCode::kInvalidArgument,
          "cosine_lr requires 0 <= step <= total");
  const double pi = std::acos(-1.0);
  return lr0 * 0.5 * (1.0 + std::cos(pi * static_cast<double>(step) / static_cast<double>(total)));
}

void TrainConfig::validate() const {
  require(total_steps > 0, ErrorCode::kConfig, "train.total_steps must be > 0");
  require(batch_size >= 1, ErrorCode::kConfig, "train.batch_size must be >= 1");
  require(lr0 > 0.0 && std::isfinite(lr0), ErrorCode::kConfig, "train.lr0 must be positive");
  require(lr_patch >= 1, ErrorCode::kConfig, "dataset.lr_patch must be >= 1");
  require(stop_at == -1 || (stop_at >= 1 && stop_at <= total_steps), ErrorCode::kConfig,
          "train.stop_at must be -1 or in [1, total_steps]");
  require(eval_every >= 0 && probe_every >= 0 && checkpoint_every >= 0, ErrorCode::kConfig,
          "eval/probe/checkpoint intervals must be >= 0");
  alpha.validate();
}

namespace {

std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string run_log_csv(const std::vector<RunLogRow>& rows) {
  std::ostringstream out;
  out << "step,alpha,train_loss,lr,val_psnr,val_ssim,probe_loss_min,probe_loss_max,probe_max_grad_diff\n";
  for (const auto& r : rows) {
    const double psnr = std::isnan(r.val_psnr) ? r.val_psnr : std::min(r.val_psnr, kPsnrCsvCap);
    out << r.step << ',' << csv_number(r.alpha) << ',' << csv_number(r.train_loss) << ','
        << csv_number(r.lr) << ',' << csv_number(psnr) << ',' << csv_number(r.val_ssim) << ','
        << csv_number(r.probe_loss_min) << ',' << csv_number(r.probe_loss_max) << ','
        << csv_number(r.probe_max_grad_diff) << '\n';
  }
  return out.str();
}

EvalResult evaluate(const Model& model, const std::vector<DatasetItem>& items, int scale,
                    bool residual_targets) {
  EvalResult result;
  if (items.empty()) return result;
  double psnr_total = 0.0, ssim_total = 0.0;
  for (const auto& item : items) {
    Image sr = model.infer(item.lr);
    if (residual_targets) {
      if (item.centroid.empty()) {
        fail(ErrorCode::kState, "residual evaluation needs centroids for item " + item.id);
      }
      sr = decode_residual(sr, item.centroid);
    }
    const Image sr_y = rgb_to_y(sr.clamped());
    const Image hr_y = rgb_to_y(item.hr);
    const int b = scale;
    const double p = psnr(sr_y, hr_y, b);
    const double s = ssim(sr_y.crop(b, b, sr_y.height() - 2 * b, sr_y.width() - 2 * b),
                          hr_y.crop(b, b, hr_y.height() - 2 * b, hr_y.width() - 2 * b));
    result.items.push_back({item.id, p, s});
    psnr_total += p;
    ssim_total += s;
  }
  result.mean_psnr = psnr_total / static_cast<double>(items.size());
  result.mean_ssim = ssim_total / static_cast<double>(items.size());
  return result;
}

PairSource make_pair_source(const TrainConfig& config, const std::vector<DatasetItem>& items, int scale,
                            const ResizeSpec& spec) {
  if (config.objective != ObjectiveMode::kVanilla) {
    for (const auto& item : items) {
      if (item.centroid.empty()) {
        fail(ErrorCode::kState, "objective " + to_string(config.objective) +
                                    " needs a centroid cache; run gen-centroids first");
      }
    }
  }
  auto sampler = std::make_shared<BatchSampler>(config.seed, items.size(), config.batch_size);
  const ObjectiveMode mode = config.objective;
  const int patch = config.lr_patch;
  const bool do_augment = config.augment;
  return [sampler, &items, mode, patch, do_augment, scale, spec](long step, double alpha) {
    std::vector<TrainingPair> pairs;
    for (const SampleRef& ref : sampler->batch(step)) {
      Rng rng(ref.stream);
      PatchTuple t = sample_patch(items[ref.item], scale, patch, rng);
      if (do_augment) t = augment(t, rng);
      switch (mode) {
        case ObjectiveMode::kVanilla: pairs.push_back(vanilla_pair(t.lr, t.hr, scale)); break;
        case ObjectiveMode::kKd: pairs.push_back(kd_pair(t.lr, t.centroid, scale)); break;
        case ObjectiveMode::kEco:
          pairs.push_back(eco_pair(t.hr, t.centroid, static_cast<float>(alpha), spec));
          break;
        case ObjectiveMode::kResidualRegression:
          pairs.push_back(residual_pair(t.lr, t.hr, t.centroid, scale));
          break;
      }
    }
    return pairs;
  };
}

TrainResult train(Model& model, const TrainConfig& config, const PairSource& pairs,
                  const std::vector<DatasetItem>* val_items, int scale, const TrainHooks& hooks) {
  config.validate();
  const std::vector<double> etas =
      config.probe_etas.empty() ? default_probe_etas(config.lr0) : config.probe_etas;
  const bool residual = config.objective == ObjectiveMode::kResidualRegression;
  AdamState adam = AdamState::for_model(model);
  TrainResult result;

  const long last = config.stop_at < 0 ? config.total_steps : config.stop_at;
  for (long step = 0; step <= last; ++step) {
    const bool final_step = step == last;
    const bool eval_now = val_items && !val_items->empty() &&
                          (final_step || (config.eval_every > 0 && step % config.eval_every == 0));
    const bool probe_now = !final_step && config.probe_every > 0 && step % config.probe_every == 0 &&
                           (config.probe_until < 0 || step <= config.probe_until);
    RunLogRow row;
    row.step = step;
    if (eval_now) {
      const EvalResult ev = evaluate(model, *val_items, scale, residual);
      row.val_psnr = ev.mean_psnr;
      row.val_ssim = ev.mean_ssim;
    }
    if (final_step) {
      if (hooks.checkpoint) hooks.checkpoint(model, step);
      if (eval_now) {
        result.log.push_back(row);
        if (hooks.row) hooks.row(row);
      }
      break;
    }

    const double alpha = config.objective == ObjectiveMode::kVanilla
                             ? 1.0
                             : alpha_at(config.alpha, step, config.total_steps);
    const double lr = cosine_lr(step, config.total_steps, config.lr0);
    const std::vector<TrainingPair> step_pairs = pairs(step, alpha);
    const Batch batch = make_batch(step_pairs);

    if (probe_now) {
      ProbeReport probe = landscape_probe(model, batch, etas, config.loss, step);
      const auto [lo, hi] = std::minmax_element(probe.losses_along_ray.begin(), probe.losses_along_ray.end());
      row.probe_loss_min = *lo;
      row.probe_loss_max = *hi;
      row.probe_max_grad_diff = probe.max_grad_diff;
      if (hooks.probe) hooks.probe(probe);
      result.probes.push_back(std::move(probe));
    }

    model.zero_grad();
    const Var pred = model.forward(constant(batch.input));
    const Var loss = config.loss == LossKind::kL1 ? l1_loss(pred, batch.target) : l2_loss(pred, batch.target);
    const float loss_value = loss->value()[0];
    if (!std::isfinite(loss_value)) {
      fail(ErrorCode::kNumeric, "non-finite training loss at step " + std::to_string(step));
    }
    backward(loss);
    adam_step(model, adam, lr, config.adam);

    row.alpha = step_pairs.front().mode == ObjectiveMode::kEco ? alpha : step_pairs.front().alpha;
    row.train_loss = loss_value;
    row.lr = lr;
    result.step_losses.push_back(loss_value);
    if (eval_now || probe_now) {
      result.log.push_back(row);
      if (hooks.row) hooks.row(row);
    }
    const long completed = step + 1;
    if (hooks.checkpoint && config.checkpoint_every > 0 && completed < last &&
        completed % config.checkpoint_every == 0) {
      hooks.checkpoint(model, completed);
    }
  }
  return result;
}

}  // namespace eco
