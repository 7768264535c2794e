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

#include <complex>
#include <limits>
#include <vector>

#include "eco/batch.hpp"
#include "eco/image.hpp"
#include "eco/model.hpp"

namespace eco {

inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kPsnrCsvCap = 99.0;

// 10 log10(1 / MSE) over the interior after dropping `border` pixels on
// every side. Identical inputs give +inf.
double psnr(const Image& a, const Image& b, int border);

// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
// K2 = 0.03, dynamic range 1, valid positions only. Single-channel input.
double ssim(const Image& a, const Image& b);

struct ProbeReport {
  long step = 0;
  std::vector<double> etas;
  std::vector<double> losses_along_ray;
  std::vector<double> grad_diffs;  // per eta, L2 over all parameters
  double max_grad_diff = 0.0;
  double baseline_loss = 0.0;
  double baseline_grad_norm = 0.0;
};

// `count` log-spaced step sizes over [0.1 lr, 10 lr].
std::vector<double> default_probe_etas(double lr, int count = 8);

// Loss and gradient behaviour along the steepest-descent ray theta - eta g
// on one fixed batch. Works on a clone; `model` is left untouched.
ProbeReport landscape_probe(const Model& model, const Batch& batch, const std::vector<double>& etas,
                            LossKind kind, long step = 0);

struct Spectrum {
  int height = 0;
  int width = 0;
  std::vector<std::complex<double>> bins;  // row-major, DC at (0, 0)

  std::complex<double> at(int y, int x) const {
    return bins[static_cast<std::size_t>(y) * width + x];
  }
};

// Unnormalized 2-D DFT of a single-channel image (direct separable sums).
Spectrum dft2(const Image& img);
// Inverse with the 1/(HW) factor; returns the real part.
Image idft2(const Spectrum& spectrum);

struct SpectrumReport {
  Image magnitude;             // H x W x 1, DC moved to (H/2, W/2)
  std::vector<double> profile;  // mean magnitude per integer radius band
};

// Centered magnitude and radial profile of length floor(min(H, W) / 2);
// radii beyond the last band are folded into it.
SpectrumReport spectrum_report(const Spectrum& spectrum);
// Share of total profile mass in the top `fraction` of bands.
double top_band_fraction(const std::vector<double>& profile, double fraction = 0.25);

// Gradient of the L1 loss with respect to the target image, averaged over
// channels: -sign(f(input) - target) / numel.
Image target_gradient_plane(const Image& prediction, const Image& target);
SpectrumReport gradient_spectrum(const Model& model, const TrainingPair& pair);

}  // namespace eco
