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
#include <utility>
#include <vector>

#include "eco/image.hpp"
#include "eco/model.hpp"
#include "eco/rng.hpp"

namespace eco {

// Exact-null-space degradation: s x s block means and block replication.
Image avg_pool(const Image& y, int s);
Image nn_upsample(const Image& x, int s);

// A posterior over HR images that all average-pool exactly to x.
struct PosteriorSample {
  int scale = 2;
  Image x;
  std::vector<Image> samples;
  Image mu_true;  // arithmetic mean of the samples
  std::vector<Image> eps;  // samples[i] - mu_true
};

// y_i = nn_upsample(x) + v_i - nn_upsample(avg_pool(v_i)), with v_i uniform
// in [-noise_amp, noise_amp] per pixel.
PosteriorSample make_posterior(const Image& x, int scale, int k, double noise_amp, Rng& rng);

struct JensenCheck {
  double lhs = 0.0;  // mean_i |y_i - c|_1
  double rhs = 0.0;  // |mu_true - c|_1
};

// Norms are per-pixel means of absolute values.
JensenCheck check_jensen(const PosteriorSample& sample, const Image& c);

// Largest |mean_i eps_i| over pixels.
double max_abs_mean_eps(const PosteriorSample& sample);
double mean_eps_norm(const PosteriorSample& sample);

struct PosteriorTrainingConfig {
  long steps = 500;
  int batch = 4;       // targets drawn per step, all sharing x
  double lr0 = 2e-3;   // cosine-annealed Adam
  std::uint64_t seed = 0;
  long record_every = 10;
};

struct PosteriorTrainingReport {
  std::vector<std::pair<long, double>> distance_curve;  // (step, |f(x) - mu_true|_1)
  double initial_distance = 0.0;
  double final_distance = 0.0;
  std::size_t farthest_sample = 0;  // index with the largest |eps_i|_1
  double final_distance_to_farthest = 0.0;
  Image prediction;
};

// Fits a fresh model to the single input x with L1 targets drawn uniformly
// from the posterior samples.
PosteriorTrainingReport posterior_training_check(const PosteriorSample& sample,
                                                 const ModelConfig& model_config,
                                                 const PosteriorTrainingConfig& config);

}  // namespace eco
