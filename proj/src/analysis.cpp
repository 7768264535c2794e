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

#include "eco/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "eco/error.hpp"

namespace eco {

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;

std::array<double, kSsimWindow> gaussian_taps() {
  std::array<double, kSsimWindow> g{};
  double total = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - kSsimWindow / 2;
    g[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    total += g[i];
  }
  for (double& v : g) v /= total;
  return g;
}

// Valid-region separable Gaussian filter of an h x w plane.
std::vector<double> filter_valid(const std::vector<double>& plane, int h, int w) {
  static const auto g = gaussian_taps();
  const int oh = h - kSsimWindow + 1, ow = w - kSsimWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * ow, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) acc += g[k] * plane[static_cast<std::size_t>(y) * w + x + k];
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow, 0.0);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) acc += g[k] * rows[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  return out;
}

double l2_distance(const std::vector<float>& a, const std::vector<float>& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    total += d * d;
  }
  return std::sqrt(total);
}

bool all_finite(const std::vector<float>& v) {
  return std::all_of(v.begin(), v.end(), [](float x) { return std::isfinite(x); });
}

// One-dimensional DFT along a strided line.
void dft_line(std::complex<double>* data, int n, std::size_t stride, int sign,
              std::vector<std::complex<double>>& scratch) {
  const double pi = std::acos(-1.0);
  scratch.assign(static_cast<std::size_t>(n), {0.0, 0.0});
  for (int k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (int j = 0; j < n; ++j) {
      const int idx = static_cast<int>((static_cast<long long>(k) * j) % n);
      const double angle = sign * 2.0 * pi * idx / n;
      acc += data[static_cast<std::size_t>(j) * stride] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    scratch[static_cast<std::size_t>(k)] = acc;
  }
  for (int k = 0; k < n; ++k) data[static_cast<std::size_t>(k) * stride] = scratch[static_cast<std::size_t>(k)];
}

void dft2_inplace(Spectrum& s, int sign) {
  std::vector<std::complex<double>> scratch;
  for (int y = 0; y < s.height; ++y) dft_line(&s.bins[static_cast<std::size_t>(y) * s.width], s.width, 1, sign, scratch);
  for (int x = 0; x < s.width; ++x) dft_line(&s.bins[static_cast<std::size_t>(x)], s.height, s.width, sign, scratch);
}

}  // namespace

double psnr(const Image& a, const Image& b, int border) {
  if (!a.same_extents(b)) fail(ErrorCode::kShape, "psnr: extent mismatch");
  require(border >= 0 && 2 * border < a.height() && 2 * border < a.width(), ErrorCode::kInvalidArgument,
          "psnr: border must be smaller than half the image extent");
  double total = 0.0;
  std::size_t count = 0;
  for (int y = border; y < a.height() - border; ++y)
    for (int x = border; x < a.width() - border; ++x)
      for (int c = 0; c < a.channels(); ++c) {
        const double d = static_cast<double>(a.at(y, x, c)) - b.at(y, x, c);
        total += d * d;
        ++count;
      }
  const double mse = total / static_cast<double>(count);
  if (mse == 0.0) return kPsnrInfinity;
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b) {
  if (!a.same_extents(b)) fail(ErrorCode::kShape, "ssim: extent mismatch");
  require(a.channels() == 1, ErrorCode::kShape, "ssim expects a single-channel image");
  if (a.height() < kSsimWindow || a.width() < kSsimWindow) {
    fail(ErrorCode::kShape, "ssim needs images of at least 11x11");
  }
  const int h = a.height(), w = a.width();
  const std::size_t n = static_cast<std::size_t>(h) * w;
  std::vector<double> pa(n), pb(n), paa(n), pbb(n), pab(n);
  for (std::size_t i = 0; i < n; ++i) {
    pa[i] = a.data()[i];
    pb[i] = b.data()[i];
    paa[i] = pa[i] * pa[i];
    pbb[i] = pb[i] * pb[i];
    pab[i] = pa[i] * pb[i];
  }
  const auto ma = filter_valid(pa, h, w), mb = filter_valid(pb, h, w);
  const auto maa = filter_valid(paa, h, w), mbb = filter_valid(pbb, h, w), mab = filter_valid(pab, h, w);
  double total = 0.0;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    const double va = maa[i] - ma[i] * ma[i];
    const double vb = mbb[i] - mb[i] * mb[i];
    const double cov = mab[i] - ma[i] * mb[i];
    const double num = (2.0 * ma[i] * mb[i] + kSsimC1) * (2.0 * cov + kSsimC2);
    const double den = (ma[i] * ma[i] + mb[i] * mb[i] + kSsimC1) * (va + vb + kSsimC2);
    total += num / den;
  }
  return total / static_cast<double>(ma.size());
}

std::vector<double> default_probe_etas(double lr, int count) {
  require(count >= 1, ErrorCode::kInvalidArgument, "probe needs at least one eta");
  std::vector<double> etas(static_cast<std::size_t>(count));
  const double lo = std::log(0.1 * lr), hi = std::log(10.0 * lr);
  for (int i = 0; i < count; ++i) {
    etas[i] = count == 1 ? lr : std::exp(lo + (hi - lo) * i / (count - 1));
  }
  return etas;
}

ProbeReport landscape_probe(const Model& model, const Batch& batch, const std::vector<double>& etas,
                            LossKind kind, long step) {
  for (std::size_t i = 0; i < etas.size(); ++i) {
    require(etas[i] >= 0.0, ErrorCode::kInvalidArgument, "probe etas must be nonnegative");
    require(i == 0 || etas[i] >= etas[i - 1], ErrorCode::kInvalidArgument, "probe etas must be ascending");
  }
  Model probe = model.clone();
  const LossEval base = evaluate_loss(probe, batch, kind, true);
  const std::vector<float> theta = probe.flat_values();

  ProbeReport report;
  report.step = step;
  report.etas = etas;
  report.baseline_loss = base.loss;
  double norm = 0.0;
  for (float g : base.grad) norm += static_cast<double>(g) * g;
  report.baseline_grad_norm = std::sqrt(norm);

  std::vector<float> moved(theta.size());
  for (double eta : etas) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      moved[i] = static_cast<float>(theta[i] - eta * base.grad[i]);
    }
    probe.assign_flat_values(moved);
    double loss = kPsnrInfinity, diff = kPsnrInfinity;
    if (all_finite(moved)) {
      const LossEval at = evaluate_loss(probe, batch, kind, true);
      if (std::isfinite(at.loss) && all_finite(at.grad)) {
        loss = at.loss;
        diff = l2_distance(at.grad, base.grad);
      }
    }
    report.losses_along_ray.push_back(loss);
    report.grad_diffs.push_back(diff);
    report.max_grad_diff = std::max(report.max_grad_diff, diff);
  }
  return report;
}

Spectrum dft2(const Image& img) {
  require(img.channels() == 1, ErrorCode::kShape, "dft2 expects a single-channel image");
  require(img.height() >= 1 && img.width() >= 1, ErrorCode::kShape, "dft2 of an empty image");
  Spectrum s{img.height(), img.width(), {}};
  s.bins.reserve(img.size());
  for (float v : img.data()) s.bins.emplace_back(v, 0.0);
  dft2_inplace(s, -1);
  return s;
}

Image idft2(const Spectrum& spectrum) {
  Spectrum s = spectrum;
  dft2_inplace(s, +1);
  Image out(s.height, s.width, 1);
  const double scale = 1.0 / (static_cast<double>(s.height) * s.width);
  for (std::size_t i = 0; i < s.bins.size(); ++i) out.data()[i] = static_cast<float>(s.bins[i].real() * scale);
  return out;
}

SpectrumReport spectrum_report(const Spectrum& spectrum) {
  const int h = spectrum.height, w = spectrum.width;
  SpectrumReport r;
  r.magnitude = Image(h, w, 1);
  const int bands = std::min(h, w) / 2;
  r.profile.assign(static_cast<std::size_t>(bands), 0.0);
  std::vector<std::size_t> counts(static_cast<std::size_t>(bands), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // Centered coordinates: bin (y, x) lands at ((y + h/2) mod h, (x + w/2) mod w).
      const int cy = (y + h / 2) % h, cx = (x + w / 2) % w;
      const double mag = std::abs(spectrum.at(y, x));
      r.magnitude.at(cy, cx, 0) = static_cast<float>(mag);
      if (bands == 0) continue;
      const double radius = std::hypot(cy - h / 2, cx - w / 2);
      const auto band = static_cast<std::size_t>(std::min<double>(bands - 1, std::floor(radius)));
      r.profile[band] += mag;
      ++counts[band];
    }
  }
  for (std::size_t b = 0; b < r.profile.size(); ++b) {
    if (counts[b]) r.profile[b] /= static_cast<double>(counts[b]);
  }
  return r;
}

double top_band_fraction(const std::vector<double>& profile, double fraction) {
  if (profile.empty()) return 0.0;
  const auto first = static_cast<std::size_t>(std::ceil((1.0 - fraction) * static_cast<double>(profile.size())));
  double total = 0.0, top = 0.0;
  for (std::size_t b = 0; b < profile.size(); ++b) {
    total += profile[b];
    if (b >= first) top += profile[b];
  }
  return total > 0.0 ? top / total : 0.0;
}

Image target_gradient_plane(const Image& prediction, const Image& target) {
  if (!prediction.same_extents(target)) fail(ErrorCode::kShape, "gradient plane: extent mismatch");
  const int c = target.channels();
  const double inv_numel = 1.0 / static_cast<double>(target.size());
  Image plane(target.height(), target.width(), 1);
  for (int y = 0; y < target.height(); ++y)
    for (int x = 0; x < target.width(); ++x) {
      double acc = 0.0;
      for (int ch = 0; ch < c; ++ch) {
        const float d = prediction.at(y, x, ch) - target.at(y, x, ch);
        acc += d > 0.0f ? -inv_numel : (d < 0.0f ? inv_numel : 0.0);
      }
      plane.at(y, x, 0) = static_cast<float>(acc / c);
    }
  return plane;
}

SpectrumReport gradient_spectrum(const Model& model, const TrainingPair& pair) {
  const Image prediction = model.infer(pair.input);
  return spectrum_report(dft2(target_gradient_plane(prediction, pair.target)));
}

}  // namespace eco
