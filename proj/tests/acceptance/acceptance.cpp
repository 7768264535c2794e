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

// Acceptance run: one PASS/FAIL line per criterion. Arguments select
// criteria by number; --work DIR keeps (and reuses) the trained fixture.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "eco/analysis.hpp"
#include "eco/autodiff.hpp"
#include "eco/io.hpp"
#include "eco/model.hpp"
#include "eco/objectives.hpp"
#include "eco/oracle.hpp"
#include "eco/pipeline.hpp"
#include "eco/resample.hpp"
#include "eco/synth.hpp"
#include "eco/trainer.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace eco;
using eco::testing::DTensor;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// Linear interpolation between closest ranks.
double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double sample_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// ---------------------------------------------------------------- 1

struct ConvSpec {
  int ci, co, k;
};

struct RandomNet {
  std::vector<ConvSpec> convs;
  bool skip = false;     // out2 = a1 + 0.5 * conv2(a1)
  bool shuffle = false;  // pixel_shuffle(., 2) at the end
};

RandomNet random_net(Rng& rng, int cin) {
  RandomNet net;
  const int layers = 2 + static_cast<int>(rng.below(2));
  net.skip = rng.below(2) == 1;
  net.shuffle = rng.below(2) == 1 && !(layers == 2 && net.skip);
  int c = cin;
  for (int l = 0; l < layers; ++l) {
    const int k = rng.below(2) == 0 ? 1 : 3;
    int co = 1 + static_cast<int>(rng.below(4));
    if (l == 1 && net.skip) co = c;
    if (l == layers - 1 && net.shuffle) co = 4 * (1 + static_cast<int>(rng.below(2)));
    net.convs.push_back({c, co, k});
    c = co;
  }
  return net;
}

Var net_forward(const RandomNet& net, const Var& x, const std::vector<Var>& w, const std::vector<Var>& b) {
  Var h = conv2d(x, w[0], b[0]);
  h = relu(h);
  Var y = conv2d(h, w[1], b[1]);
  if (net.skip) y = add(h, scale(y, 0.5f));
  if (net.convs.size() == 3) y = conv2d(relu(y), w[2], b[2]);
  if (net.shuffle) y = pixel_shuffle(y, 2);
  return y;
}

double ref_net_loss(const RandomNet& net, const DTensor& x, const std::vector<DTensor>& w,
                    const std::vector<DTensor>& b, const DTensor& target) {
  DTensor h = eco::testing::ref_relu(eco::testing::ref_conv(x, w[0], &b[0]));
  DTensor y = eco::testing::ref_conv(h, w[1], &b[1]);
  if (net.skip)
    for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] = h.v[i] + 0.5 * y.v[i];
  if (net.convs.size() == 3) y = eco::testing::ref_conv(eco::testing::ref_relu(y), w[2], &b[2]);
  if (net.shuffle) y = eco::testing::ref_shuffle(y, 2);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.v.size(); ++i) acc += (y.v[i] - target.v[i]) * (y.v[i] - target.v[i]);
  return acc / static_cast<double>(y.v.size());
}

Outcome criterion_gradients() {
  const double h = 1e-6;
  std::size_t checked = 0, bad = 0;
  double worst_ratio = 0.0;
  for (int n = 0; n < 20; ++n) {
    Rng rng(5000 + n);
    const int batch = 1 + static_cast<int>(rng.below(2));
    const int cin = 1 + static_cast<int>(rng.below(3));
    const int ih = 3 + static_cast<int>(rng.below(4)), iw = 3 + static_cast<int>(rng.below(4));
    const RandomNet net = random_net(rng, cin);
    std::vector<Var> w, b;
    for (const ConvSpec& c : net.convs) {
      w.push_back(parameter(eco::testing::random_tensor(rng, {c.co, c.ci, c.k, c.k}, -0.8, 0.8)));
      b.push_back(parameter(eco::testing::random_tensor(rng, {c.co}, -0.3, 0.3)));
    }
    const Tensor xt = eco::testing::random_tensor(rng, {batch, cin, ih, iw}, -1.0, 1.0);
    const Var out = net_forward(net, constant(xt), w, b);
    const Tensor target = eco::testing::random_tensor(rng, out->shape(), -1.0, 1.0);
    const Var loss = l2_loss(out, target);
    backward(loss);

    const DTensor dx = DTensor::from(xt), dt = DTensor::from(target);
    std::vector<DTensor> dw, db;
    for (std::size_t l = 0; l < w.size(); ++l) {
      dw.push_back(DTensor::from(w[l]->value()));
      db.push_back(DTensor::from(b[l]->value()));
    }
    auto check = [&](DTensor& p, const Tensor& grad) {
      for (std::size_t i = 0; i < p.v.size(); ++i) {
        const double saved = p.v[i];
        p.v[i] = saved + h;
        const double up = ref_net_loss(net, dx, dw, db, dt);
        p.v[i] = saved - h;
        const double down = ref_net_loss(net, dx, dw, db, dt);
        p.v[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double tol = std::max(1e-3 * std::abs(numeric), 1e-5);
        const double err = std::abs(static_cast<double>(grad[i]) - numeric);
        worst_ratio = std::max(worst_ratio, err / tol);
        ++checked;
        if (err > tol) ++bad;
      }
    };
    for (std::size_t l = 0; l < w.size(); ++l) {
      check(dw[l], w[l]->grad());
      check(db[l], b[l]->grad());
    }
  }
  return {bad == 0, fmt("%zu parameter entries, %zu outside tolerance, worst err/tol %.3g", checked, bad,
                        worst_ratio)};
}

// ---------------------------------------------------------------- 2

Outcome criterion_resampler() {
  Rng rng(6000);
  double worst = 0.0;
  int cases = 0;
  for (int i = 0; i < 50; ++i) {
    const int h = 3 + static_cast<int>(rng.below(14)), w = 3 + static_cast<int>(rng.below(14));
    const int c = rng.below(2) == 0 ? 1 : 3;
    const Image img = eco::testing::random_image(rng, h, w, c);
    for (const char* s : {"1/2", "1/3", "2"})
      for (bool aa : {true, false}) {
        const ResizeSpec spec = ResizeSpec::parse(s, aa, -0.5);
        int oh = 0, ow = 0;
        const std::vector<double> ref = eco::testing::ref_resize(img, spec, &oh, &ow);
        const Image out = resize(img, spec);
        if (out.height() != oh || out.width() != ow) return {false, fmt("extent mismatch on %dx%d", h, w)};
        for (std::size_t j = 0; j < ref.size(); ++j)
          worst = std::max(worst, std::abs(static_cast<double>(out.data()[j]) - ref[j]));
        ++cases;
      }
  }
  return {worst <= 1e-5, fmt("%d resizes, max abs diff %.3g (tol 1e-5)", cases, worst)};
}

// ---------------------------------------------------------------- 3

Outcome criterion_endpoints() {
  Rng rng(7000);
  double endpoint = 0.0, affine = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int s = 2 + static_cast<int>(rng.below(3));
    const int h = s * (3 + static_cast<int>(rng.below(6))), w = s * (3 + static_cast<int>(rng.below(6)));
    const Image y = eco::testing::random_image(rng, h, w, 3);
    const Image mu = eco::testing::random_image(rng, h, w, 3);
    const ResizeSpec spec = ResizeSpec::downscale(s);
    const TrainingPair p0 = eco_pair(y, mu, 0.0f, spec);
    const TrainingPair p1 = eco_pair(y, mu, 1.0f, spec);
    endpoint = std::max({endpoint, max_abs_diff(p0.input, resize(mu, spec)), max_abs_diff(p0.target, mu),
                         max_abs_diff(p1.input, resize(y, spec)), max_abs_diff(p1.target, y)});
    const double alpha = rng.uniform();
    const TrainingPair pa = eco_pair(y, mu, static_cast<float>(alpha), spec);
    for (std::size_t j = 0; j < pa.target.size(); ++j) {
      const double expect = (1.0 - alpha) * p0.target.data()[j] + alpha * p1.target.data()[j];
      affine = std::max(affine, std::abs(pa.target.data()[j] - expect));
    }
  }
  return {endpoint <= 1e-6 && affine <= 1e-6,
          fmt("endpoint max diff %.3g, affine max diff %.3g (tol 1e-6)", endpoint, affine)};
}

// ---------------------------------------------------------------- 4

Outcome criterion_consistency() {
  Rng rng(8000);
  double eco_worst = 0.0;
  double kd_lo = 1.0, kd_hi = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int s = 2 + static_cast<int>(rng.below(2));
    const int h = s * (6 + static_cast<int>(rng.below(6))), w = s * (6 + static_cast<int>(rng.below(6)));
    const ResizeSpec spec = ResizeSpec::downscale(s);
    const Image y = eco::testing::random_image(rng, h, w, 3);
    const Image mu = eco::testing::random_image(rng, h, w, 3);
    for (int k = 0; k <= 10; ++k) {
      const TrainingPair p = eco_pair(y, mu, static_cast<float>(k / 10.0), spec);
      eco_worst = std::max(eco_worst, spatial_consistency_residual(p, spec));
    }
    Image ys = synth_image(h, w, 8100 + i);
    for (float& v : ys.data()) v = 0.1f + 0.75f * v;
    const Image teacher = add_scalar(ys, 0.05f);
    const TrainingPair kd = kd_pair(resize(ys, spec), teacher, s);
    const double r = spatial_consistency_residual(kd, spec);
    kd_lo = std::min(kd_lo, r);
    kd_hi = std::max(kd_hi, r);
  }
  const bool pass = eco_worst < 1e-5 && kd_lo >= 0.045 && kd_hi <= 0.055;
  return {pass, fmt("eco max residual %.3g (< 1e-5), kd residual in [%.5f, %.5f] (want [0.045, 0.055])",
                    eco_worst, kd_lo, kd_hi)};
}

// ---------------------------------------------------------------- 5

Outcome criterion_jensen() {
  Rng rng(9000);
  const Image x = eco::testing::random_image(rng, 8, 8, 3, 0.2, 0.8);
  const PosteriorSample post = make_posterior(x, 2, 16, 0.2, rng);
  int violations = 0;
  double min_gap = 1e9;
  for (int t = 0; t < 1000; ++t) {
    Image c;
    if (t % 10 == 0) {
      // points close to the centroid, where the bound is tightest
      c = post.mu_true;
      for (float& v : c.data()) v += static_cast<float>(rng.uniform(-1e-3, 1e-3));
    } else {
      c = eco::testing::random_image(rng, 16, 16, 3);
    }
    const JensenCheck j = check_jensen(post, c);
    min_gap = std::min(min_gap, j.lhs - j.rhs);
    if (j.rhs > j.lhs + 1e-6) ++violations;
  }
  const double mean_eps = max_abs_mean_eps(post);
  return {violations == 0 && mean_eps < 1e-7,
          fmt("%d violations in 1000 probes (min lhs-rhs %.3g), max |mean eps| %.3g (< 1e-7)", violations,
              min_gap, mean_eps)};
}

// ---------------------------------------------------------------- 6

Outcome criterion_centroid() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(10000);
  const Image x = eco::testing::random_image(rng, 8, 8, 3, 0.2, 0.8);
  const PosteriorSample post = make_posterior(x, 2, 16, 0.2, rng);
  ModelConfig mc;
  PosteriorTrainingConfig pc;
  pc.steps = 500;
  const PosteriorTrainingReport r = posterior_training_check(post, mc, pc);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double drop = 1.0 - r.final_distance / r.initial_distance;
  const bool pass = drop >= 0.5 && r.final_distance < r.final_distance_to_farthest && secs < 120.0;
  return {pass, fmt("distance %.4f -> %.4f (drop %.1f%%, want >= 50%%), farthest sample %.4f, %.1fs (< 120s)",
                    r.initial_distance, r.final_distance, 100.0 * drop, r.final_distance_to_farthest, secs)};
}

// ---------------------------------------------------------------- 9

Outcome criterion_metrics() {
  Rng rng(11000);
  Image a = eco::testing::random_image(rng, 32, 32, 1, 0.1, 0.9);
  for (float& v : a.data()) v = std::round(v * 255.0f) / 255.0f;
  const Image b = add_scalar(a, 1.0f / 255.0f);
  const double p = psnr(a, b, 0);
  const Image img = eco::testing::random_image(rng, 24, 24, 1);
  const double self = ssim(img, img);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const int h = 11 + static_cast<int>(rng.below(14)), w = 11 + static_cast<int>(rng.below(14));
    const Image u = eco::testing::random_image(rng, h, w, 1);
    Image v = u;
    for (float& e : v.data()) e = std::clamp(e + static_cast<float>(rng.uniform(-0.2, 0.2)), 0.0f, 1.0f);
    worst = std::max(worst, std::abs(ssim(u, v) - eco::testing::ref_ssim(u, v)));
  }
  const bool pass = std::abs(p - 48.13) <= 0.01 && std::abs(self - 1.0) < 1e-12 && worst <= 1e-6;
  return {pass, fmt("1/255 offset PSNR %.4f dB (48.13 +- 0.01), SSIM(x,x) %.12f, SSIM vs oracle max diff %.3g",
                    p, self, worst)};
}

// ---------------------------------------------------------------- fixture

struct Fixture {
  fs::path root;
  bool keep = false;
  std::vector<DatasetItem> train_items;
  std::vector<DatasetItem> val_items;
  std::optional<Model> teacher;
  ModelConfig model_config;
  ResizeSpec spec = ResizeSpec::downscale(2);

  ~Fixture() {
    std::error_code ec;
    if (!keep && !root.empty()) fs::remove_all(root, ec);
  }
};

struct ArmKey {
  ObjectiveMode mode;
  std::uint64_t seed;
  int batch;
  long stop;
  auto operator<=>(const ArmKey&) const = default;
};

struct Arm {
  TrainResult result;
  std::string log_csv;
  std::vector<char> checkpoint;
  std::vector<char> sidecar;
  double seconds = 0.0;
};

class Lab {
 public:
  Lab(std::optional<fs::path> work) {
    if (work) {
      fx_.root = *work;
      fx_.keep = true;
    } else {
      fx_.root = fs::temp_directory_path() / ("eco_acceptance_" + std::to_string(::getpid()));
      fs::remove_all(fx_.root);
    }
    fs::create_directories(fx_.root);
  }

  Fixture& fixture() {
    if (ready_) return fx_;
    ready_ = true;
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path hr = fx_.root / "hr", val_hr = fx_.root / "val_hr";
    if (!fs::exists(hr)) {
      fs::create_directories(hr);
      fs::create_directories(val_hr);
      write_synth_corpus(hr, 32, 96, 1000);
      write_synth_corpus(val_hr, 8, 96, 9000);
    }
    DatasetManifest train_m = prepare_dataset(hr, fx_.root / "data", 2, true, -0.5, true);
    DatasetManifest val_m = prepare_dataset(val_hr, fx_.root / "val", 2, true, -0.5, true);
    fx_.train_items = load_items(train_m);
    fx_.val_items = load_items(val_m);

    const fs::path ckpt = fx_.root / "teacher.ecot";
    if (fx_.keep && fs::exists(ckpt) && fs::exists(checkpoint_sidecar(ckpt))) {
      fx_.teacher.emplace(load_checkpoint(ckpt).model);
      std::printf("# reusing teacher %s\n", ckpt.c_str());
    } else {
      Model teacher = Model::init(fx_.model_config, 777);
      TrainConfig tc;
      tc.total_steps = 2000;
      tc.batch_size = 16;
      tc.lr0 = 1e-3;
      tc.seed = 777;
      tc.eval_every = 500;
      const TrainResult r =
          train(teacher, tc, make_pair_source(tc, fx_.train_items, 2, fx_.spec), &fx_.val_items, 2);
      save_checkpoint(ckpt, teacher, tc.total_steps);
      std::printf("# teacher val PSNR %.3f dB after %ld steps\n", r.log.back().val_psnr, tc.total_steps);
      fx_.teacher.emplace(std::move(teacher));
    }
    const std::string hash = checkpoint_hash(ckpt);
    attach_centroids(fx_.train_items,
                     generate_centroids(train_m, *fx_.teacher, hash, fx_.root / "data" / "centroids", true));
    attach_centroids(fx_.val_items,
                     generate_centroids(val_m, *fx_.teacher, hash, fx_.root / "val" / "centroids", true));
    std::printf("# fixture ready in %.1fs\n",
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    std::fflush(stdout);
    return fx_;
  }

  // Memoized unless `fresh`; full-length runs also serve shorter prefixes.
  const Arm& arm(ObjectiveMode mode, std::uint64_t seed, int batch, long stop, bool fresh = false) {
    if (!fresh) {
      if (auto it = arms_.find({mode, seed, batch, stop}); it != arms_.end()) return it->second;
      if (stop != -1)
        if (auto it = arms_.find({mode, seed, batch, -1}); it != arms_.end()) return it->second;
    }
    Fixture& fx = fixture();
    const auto t0 = std::chrono::steady_clock::now();
    TrainConfig c;
    c.total_steps = 2000;
    c.stop_at = stop;
    c.batch_size = batch;
    c.lr0 = 1e-3;
    c.seed = seed;
    c.objective = mode;
    c.eval_every = 100;
    if (batch == 4 && stop == -1) {
      c.probe_every = 10;
      c.probe_until = 400;
    }
    Model model = Model::init(fx.model_config, seed);
    Arm a;
    a.result = train(model, c, make_pair_source(c, fx.train_items, 2, fx.spec), &fx.val_items, 2);
    a.log_csv = run_log_csv(a.result.log);
    const fs::path ckpt = fx.root / fmt("arm_%s_%llu_%d_%ld.ecot", to_string(mode).c_str(),
                                        static_cast<unsigned long long>(seed), batch, stop);
    save_checkpoint(ckpt, model, static_cast<long>(a.result.step_losses.size()));
    a.checkpoint = read_file(ckpt);
    a.sidecar = read_file(checkpoint_sidecar(ckpt));
    a.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("#   %s seed %llu batch %d: %.1fs\n", to_string(mode).c_str(),
                static_cast<unsigned long long>(seed), batch, a.seconds);
    std::fflush(stdout);
    if (fresh) {
      scratch_ = std::make_unique<Arm>(std::move(a));
      return *scratch_;
    }
    return arms_.emplace(ArmKey{mode, seed, batch, stop}, std::move(a)).first->second;
  }

 private:
  Fixture fx_;
  bool ready_ = false;
  std::map<ArmKey, Arm> arms_;
  std::unique_ptr<Arm> scratch_;
};

double psnr_at(const Arm& a, long step) {
  for (const RunLogRow& row : a.result.log)
    if (row.step == step && !std::isnan(row.val_psnr)) return row.val_psnr;
  return std::nan("");
}

// ---------------------------------------------------------------- 7

Outcome criterion_stability(Lab& lab) {
  lab.fixture();
  const auto t0 = std::chrono::steady_clock::now();
  double psnr_v = 0.0, psnr_e = 0.0;
  int grad_wins = 0;
  std::string per_seed;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Arm& v = lab.arm(ObjectiveMode::kVanilla, seed, 4, -1);
    const Arm& e = lab.arm(ObjectiveMode::kEco, seed, 4, -1);
    psnr_v += psnr_at(v, 500) / 3.0;
    psnr_e += psnr_at(e, 500) / 3.0;
    std::vector<double> gv, ge;
    for (const ProbeReport& p : v.result.probes) gv.push_back(p.max_grad_diff);
    for (const ProbeReport& p : e.result.probes) ge.push_back(p.max_grad_diff);
    const double pv = percentile(gv, 0.95), pe = percentile(ge, 0.95);
    if (pe <= pv) ++grad_wins;
    per_seed += fmt(" seed%llu p95 vanilla %.4f eco %.4f;", static_cast<unsigned long long>(seed), pv, pe);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool a = psnr_e >= psnr_v, b = grad_wins >= 2;
  return {a && b && secs < 1800.0,
          fmt("(a) %s mean PSNR@500 eco %.3f vs vanilla %.3f; (b) %s eco p95 grad diff <= vanilla in %d/3 "
              "seeds;%s arms %.0fs (< 1800s)",
              a ? "ok" : "FAIL", psnr_e, psnr_v, b ? "ok" : "FAIL", grad_wins, per_seed.c_str(), secs)};
}

// ---------------------------------------------------------------- 8

Outcome criterion_batch(Lab& lab) {
  std::string detail;
  double std_v2 = 0.0, std_e2 = 0.0;
  for (int batch : {2, 4, 16}) {
    std::vector<double> pv, pe;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      pv.push_back(psnr_at(lab.arm(ObjectiveMode::kVanilla, seed, batch, 500), 500));
      pe.push_back(psnr_at(lab.arm(ObjectiveMode::kEco, seed, batch, 500), 500));
    }
    const double sv = sample_std(pv), se = sample_std(pe);
    if (batch == 2) {
      std_v2 = sv;
      std_e2 = se;
    }
    double mv = 0.0, me = 0.0;
    for (int i = 0; i < 3; ++i) {
      mv += pv[i] / 3.0;
      me += pe[i] / 3.0;
    }
    detail += fmt(" batch %d std eco %.4f vanilla %.4f (mean %.3f / %.3f);", batch, se, sv, me, mv);
  }
  return {std_e2 <= std_v2, "PSNR@500 std across seeds:" + detail + " gate is batch 2"};
}

// ---------------------------------------------------------------- 10

Outcome criterion_determinism(Lab& lab) {
  const Arm& first = lab.arm(ObjectiveMode::kEco, 0, 4, -1);
  const std::string log = first.log_csv;
  const std::vector<char> ckpt = first.checkpoint, sidecar = first.sidecar;
  const Arm& second = lab.arm(ObjectiveMode::kEco, 0, 4, -1, true);
  const bool same_log = log == second.log_csv;
  const bool same_ckpt = ckpt == second.checkpoint && sidecar == second.sidecar;
  return {same_log && same_ckpt, fmt("run log %s (%zu bytes), checkpoint %s (%zu bytes)",
                                     same_log ? "identical" : "differs", log.size(),
                                     same_ckpt ? "identical" : "differs", ckpt.size())};
}

// ---------------------------------------------------------------- 11

Outcome criterion_spectrum(Lab& lab) {
  Fixture& fx = lab.fixture();
  int wins = 0;
  std::string detail;
  for (int i = 0; i < 10; ++i) {
    const DatasetItem& item = fx.train_items[i];
    const TrainingPair vanilla = vanilla_pair(item.lr, item.hr, 2);
    const TrainingPair eco = eco_pair(item.hr, item.centroid, 0.0f, fx.spec);
    const double fv = top_band_fraction(gradient_spectrum(*fx.teacher, vanilla).profile);
    const double fe = top_band_fraction(gradient_spectrum(*fx.teacher, eco).profile);
    if (fe < fv) ++wins;
    detail += fmt(" %.3f/%.3f", fe, fv);
  }
  return {wins >= 8, fmt("eco < vanilla top-quartile fraction on %d/10 items (want >= 8); eco/vanilla:%s", wins,
                         detail.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  std::optional<fs::path> work;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--work" && i + 1 < argc) {
      work = argv[++i];
    } else {
      selected.insert(std::stoi(a));
    }
  }
  Lab lab(work);
  const std::vector<std::tuple<int, const char*, std::function<Outcome()>>> criteria{
      {1, "gradient correctness", criterion_gradients},
      {2, "resampler oracle equivalence", criterion_resampler},
      {3, "endpoint identities", criterion_endpoints},
      {4, "spatial consistency", criterion_consistency},
      {5, "Jensen bound", criterion_jensen},
      {6, "centroid convergence", criterion_centroid},
      {7, "early-training stability", [&] { return criterion_stability(lab); }},
      {8, "batch-size robustness", [&] { return criterion_batch(lab); }},
      {9, "metric sanity", criterion_metrics},
      {10, "determinism", [&] { return criterion_determinism(lab); }},
      {11, "spectral direction", [&] { return criterion_spectrum(lab); }},
  };
  int failures = 0;
  for (const auto& [id, name, run] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
