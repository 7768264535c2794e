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

#include "eco/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "eco/analysis.hpp"
#include "eco/error.hpp"
#include "eco/io.hpp"
#include "eco/oracle.hpp"
#include "eco/synth.hpp"

namespace fs = std::filesystem;

namespace eco {

Json default_config() {
  return Json{
      {"seed", 0},
      {"dataset",
       {{"hr_dir", ""}, {"scale", 2}, {"antialias", true}, {"kernel_a", -0.5}, {"lr_patch", 48}, {"augment", true}}},
      {"model", {{"channels", 16}, {"n_blocks", 4}, {"residual_scaling", 1.0}}},
      {"train",
       {{"total_steps", 2000},
        {"batch_size", 16},
        {"lr0", 1e-4},
        {"loss", "l1"},
        {"eval_every", 100},
        {"checkpoint_every", 0},
        {"stop_at", -1},
        {"adam", {{"beta1", 0.9}, {"beta2", 0.999}, {"eps", 1e-8}}}}},
      {"objective", "vanilla"},
      {"alpha_schedule", {{"kind", "linear_ramp"}, {"ramp_end_fraction", 0.5}, {"alpha_start", 0.0}, {"alpha_end", 1.0}}},
      {"probe", {{"every", 0}, {"until", -1}, {"etas", Json::array()}, {"batches", 1}}},
      {"paths",
       {{"data_dir", "data"},
        {"val_dir", ""},
        {"centroid_dir", ""},
        {"val_centroid_dir", ""},
        {"teacher", ""},
        {"out_dir", "runs/default"}}},
  };
}

namespace {

const char* type_label(const Json& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  if (v.is_object()) return "object";
  return "null";
}

bool compatible(const Json& base, const Json& value) {
  if (base.is_number_integer()) return value.is_number_integer();
  if (base.is_number()) return value.is_number();
  if (base.is_array()) return value.is_array() && std::all_of(value.begin(), value.end(), [](const Json& e) {
                                 return e.is_number();
                               });
  return std::string(type_label(base)) == type_label(value);
}

void merge_into(Json& base, const Json& overlay, const std::string& prefix) {
  if (!overlay.is_object()) fail(ErrorCode::kConfig, "config" + (prefix.empty() ? "" : " section '" + prefix + "'") + " must be an object");
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!base.contains(it.key())) fail(ErrorCode::kConfig, "unknown config key '" + key + "'");
    Json& slot = base[it.key()];
    if (slot.is_object()) {
      merge_into(slot, it.value(), key);
    } else if (!compatible(slot, it.value())) {
      fail(ErrorCode::kConfig, "config key '" + key + "' expects " + type_label(slot) + ", got " +
                                   type_label(it.value()));
    } else if (slot.is_number_float()) {
      slot = it.value().get<double>();
    } else {
      slot = it.value();
    }
  }
}

}  // namespace

Json resolve_config(const Json& file, const Json& overrides) {
  Json config = default_config();
  if (!file.is_null()) merge_into(config, file, "");
  if (!overrides.is_null()) merge_into(config, overrides, "");
  model_config_from(config).validate();
  train_config_from(config).validate();
  resize_spec_from(config);
  return config;
}

ModelConfig model_config_from(const Json& config) {
  ModelConfig m;
  m.scale = config["dataset"]["scale"].get<int>();
  m.channels = config["model"]["channels"].get<int>();
  m.n_blocks = config["model"]["n_blocks"].get<int>();
  m.residual_scaling = config["model"]["residual_scaling"].get<float>();
  return m;
}

TrainConfig train_config_from(const Json& config) {
  const Json& t = config["train"];
  const Json& a = config["alpha_schedule"];
  const Json& p = config["probe"];
  TrainConfig c;
  c.total_steps = t["total_steps"].get<long>();
  c.batch_size = t["batch_size"].get<int>();
  c.lr0 = t["lr0"].get<double>();
  c.loss = parse_loss(t["loss"].get<std::string>());
  c.eval_every = t["eval_every"].get<long>();
  c.checkpoint_every = t["checkpoint_every"].get<long>();
  c.stop_at = t["stop_at"].get<long>();
  c.adam.beta1 = t["adam"]["beta1"].get<double>();
  c.adam.beta2 = t["adam"]["beta2"].get<double>();
  c.adam.eps = t["adam"]["eps"].get<double>();
  c.objective = parse_objective(config["objective"].get<std::string>());
  c.alpha.kind = parse_schedule_kind(a["kind"].get<std::string>());
  c.alpha.ramp_end_fraction = a["ramp_end_fraction"].get<double>();
  c.alpha.alpha_start = a["alpha_start"].get<double>();
  c.alpha.alpha_end = a["alpha_end"].get<double>();
  c.probe_every = p["every"].get<long>();
  c.probe_until = p["until"].get<long>();
  c.probe_etas = p["etas"].get<std::vector<double>>();
  c.seed = config["seed"].get<std::uint64_t>();
  c.lr_patch = config["dataset"]["lr_patch"].get<int>();
  c.augment = config["dataset"]["augment"].get<bool>();
  for (std::size_t i = 0; i < c.probe_etas.size(); ++i) {
    require(c.probe_etas[i] > 0.0 && (i == 0 || c.probe_etas[i] > c.probe_etas[i - 1]), ErrorCode::kConfig,
            "probe.etas must be positive and ascending");
  }
  return c;
}

ResizeSpec resize_spec_from(const Json& config) {
  const int scale = config["dataset"]["scale"].get<int>();
  require(scale >= 1, ErrorCode::kConfig, "dataset.scale must be >= 1");
  return ResizeSpec::downscale(scale, config["dataset"]["antialias"].get<bool>(),
                               config["dataset"]["kernel_a"].get<double>());
}

namespace {

// Paths created by a command. Removed again unless the command commits.
class OutputGuard {
 public:
  OutputGuard(bool force) : force_(force) {}
  OutputGuard(const OutputGuard&) = delete;
  OutputGuard& operator=(const OutputGuard&) = delete;
  ~OutputGuard() {
    if (committed_) return;
    for (const auto& p : claimed_) {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  }

  // Call before anything is written to `p`.
  fs::path claim(const fs::path& p) {
    if (fs::exists(p)) {
      if (!force_) fail(ErrorCode::kState, p.string() + " already exists; pass --force to overwrite");
      fs::remove_all(p);
    }
    claimed_.push_back(p);
    return p;
  }

  void commit() { committed_ = true; }

 private:
  bool force_;
  bool committed_ = false;
  std::vector<fs::path> claimed_;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_atomic(path, std::span<const char>(text.data(), text.size()));
}

void write_json(const fs::path& path, const Json& value) { write_text(path, value.dump(2) + "\n"); }

std::string arg_string(const Json& args, const char* key, const std::string& fallback = "") {
  if (!args.contains(key) || args[key].is_null()) return fallback;
  if (!args[key].is_string()) fail(ErrorCode::kInvalidArgument, std::string("argument '") + key + "' must be a string");
  return args[key].get<std::string>();
}

std::string required_arg(const Json& args, const char* key, const char* flag) {
  std::string v = arg_string(args, key);
  if (v.empty()) fail(ErrorCode::kInvalidArgument, std::string("missing required ") + flag);
  return v;
}

template <typename T>
T arg_value(const Json& args, const char* key, T fallback) {
  if (!args.contains(key) || args[key].is_null()) return fallback;
  try {
    return args[key].get<T>();
  } catch (const Json::exception&) {
    fail(ErrorCode::kInvalidArgument, std::string("argument '") + key + "' has the wrong type");
  }
}

bool force_of(const Json& args) { return arg_value<bool>(args, "force", false); }

fs::path path_in(const Json& config, const char* key) { return fs::path(config["paths"][key].get<std::string>()); }

fs::path centroid_dir(const Json& config) {
  fs::path dir = path_in(config, "centroid_dir");
  return dir.empty() ? path_in(config, "data_dir") / "centroids" : dir;
}

fs::path val_centroid_dir(const Json& config) {
  fs::path dir = path_in(config, "val_centroid_dir");
  return dir.empty() ? path_in(config, "val_dir") / "centroids" : dir;
}

std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void check_scale(const DatasetManifest& manifest, const Json& config) {
  const int scale = config["dataset"]["scale"].get<int>();
  if (manifest.scale != scale) {
    fail(ErrorCode::kConfig, "dataset at " + manifest.root.string() + " is x" + std::to_string(manifest.scale) +
                                 " but dataset.scale is " + std::to_string(scale));
  }
}

std::vector<DatasetItem> load_training_items(const Json& config, bool need_centroids) {
  const DatasetManifest manifest = read_manifest(path_in(config, "data_dir"));
  check_scale(manifest, config);
  std::vector<DatasetItem> items = load_items(manifest);
  if (need_centroids) attach_centroids(items, read_centroid_cache(centroid_dir(config)));
  return items;
}

std::vector<DatasetItem> load_val_items(const Json& config, bool need_centroids) {
  const fs::path dir = path_in(config, "val_dir");
  if (dir.empty()) return {};
  const DatasetManifest manifest = read_manifest(dir);
  check_scale(manifest, config);
  std::vector<DatasetItem> items = load_items(manifest);
  if (need_centroids) attach_centroids(items, read_centroid_cache(val_centroid_dir(config)));
  return items;
}

const DatasetItem& find_item(const std::vector<DatasetItem>& items, const std::string& id) {
  for (const auto& item : items) {
    if (item.id == id) return item;
  }
  fail(ErrorCode::kInvalidArgument, "no item '" + id + "' in the dataset");
}

Checkpoint load_model(const fs::path& path, const Json& config) {
  Checkpoint ckpt = load_checkpoint(path);
  const int scale = config["dataset"]["scale"].get<int>();
  if (ckpt.model.config().scale != scale) {
    fail(ErrorCode::kConfig, path.string() + " is a x" + std::to_string(ckpt.model.config().scale) +
                                 " model but dataset.scale is " + std::to_string(scale));
  }
  return ckpt;
}

std::string checkpoint_name(long step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ckpt_%06ld.ecot", step);
  return buf;
}

std::string probes_csv(const std::vector<ProbeReport>& probes) {
  std::ostringstream out;
  out << "step,eta,loss,grad_diff\n";
  for (const auto& p : probes) {
    out << p.step << ",0," << csv_double(p.baseline_loss) << ",0\n";
    for (std::size_t i = 0; i < p.etas.size(); ++i) {
      out << p.step << ',' << csv_double(p.etas[i]) << ',' << csv_double(p.losses_along_ray[i]) << ','
          << csv_double(p.grad_diffs[i]) << '\n';
    }
  }
  return out.str();
}

void log_row(const LogFn& log, const RunLogRow& r) {
  if (!log) return;
  std::ostringstream s;
  s << "step " << r.step;
  if (!std::isnan(r.train_loss)) s << " loss " << csv_double(r.train_loss);
  if (!std::isnan(r.val_psnr)) s << " val_psnr " << csv_double(std::min(r.val_psnr, kPsnrCsvCap));
  if (!std::isnan(r.val_ssim)) s << " val_ssim " << csv_double(r.val_ssim);
  if (!std::isnan(r.probe_max_grad_diff)) s << " probe_grad_diff " << csv_double(r.probe_max_grad_diff);
  log(s.str());
}

// One training run writing model.ecot, log.csv and probes.csv into `dir`.
Json run_training(const Json& config, const TrainConfig& tc, const fs::path& dir, const LogFn& log) {
  const bool need_centroids = tc.objective != ObjectiveMode::kVanilla;
  const bool residual = tc.objective == ObjectiveMode::kResidualRegression;
  std::vector<DatasetItem> items = load_training_items(config, need_centroids);
  std::vector<DatasetItem> val = load_val_items(config, residual);
  const ModelConfig mc = model_config_from(config);
  const ResizeSpec spec = resize_spec_from(config);
  const PairSource pairs = make_pair_source(tc, items, mc.scale, spec);

  fs::create_directories(dir);
  Model model = Model::init(mc, tc.seed);
  TrainHooks hooks;
  fs::path final_ckpt = dir / "model.ecot";
  const long last = tc.stop_at < 0 ? tc.total_steps : tc.stop_at;
  hooks.checkpoint = [&](const Model& m, long step) {
    save_checkpoint(step == last ? final_ckpt : dir / checkpoint_name(step), m, step);
  };
  hooks.row = [&](const RunLogRow& r) { log_row(log, r); };
  const TrainResult result = train(model, tc, pairs, val.empty() ? nullptr : &val, mc.scale, hooks);

  write_text(dir / "log.csv", run_log_csv(result.log));
  if (!result.probes.empty()) write_text(dir / "probes.csv", probes_csv(result.probes));

  Json report{{"out_dir", dir.string()},
              {"checkpoint", final_ckpt.string()},
              {"hash", checkpoint_hash(final_ckpt)},
              {"steps", last},
              {"objective", to_string(tc.objective)}};
  if (!result.log.empty() && !std::isnan(result.log.back().val_psnr)) {
    report["final_val_psnr"] = std::min(result.log.back().val_psnr, kPsnrCsvCap);
    report["final_val_ssim"] = result.log.back().val_ssim;
  }
  if (!result.step_losses.empty()) report["final_train_loss"] = result.step_losses.back();
  return report;
}

Json cmd_synth_data(const Json& config, const Json& args, const LogFn& log) {
  const fs::path out = required_arg(args, "out", "--out");
  const int count = arg_value<int>(args, "count", 40);
  const int size = arg_value<int>(args, "size", 96);
  require(count >= 1 && size >= 8, ErrorCode::kInvalidArgument, "--count must be >= 1 and --size >= 8");
  OutputGuard guard(force_of(args));
  guard.claim(out);
  write_synth_corpus(out, count, size, config["seed"].get<std::uint64_t>());
  guard.commit();
  if (log) log("wrote " + std::to_string(count) + " images to " + out.string());
  return Json{{"out", out.string()}, {"count", count}, {"size", size}};
}

Json cmd_prepare_data(const Json& config, const Json& args, const LogFn& log) {
  const fs::path hr_dir = config["dataset"]["hr_dir"].get<std::string>();
  if (hr_dir.empty()) fail(ErrorCode::kInvalidArgument, "missing required --hr-dir");
  const fs::path out = path_in(config, "data_dir");
  OutputGuard guard(force_of(args));
  guard.claim(out);
  const DatasetManifest manifest =
      prepare_dataset(hr_dir, out, config["dataset"]["scale"].get<int>(), config["dataset"]["antialias"].get<bool>(),
                      config["dataset"]["kernel_a"].get<double>(), true);
  write_json(out / "config.json", config);
  guard.commit();
  if (log) log("prepared " + std::to_string(manifest.items.size()) + " items in " + out.string());
  return Json{{"data_dir", out.string()}, {"items", manifest.items.size()}, {"scale", manifest.scale}};
}

Json cmd_train(const Json& config, const Json& args, const LogFn& log, bool pretrain) {
  TrainConfig tc = train_config_from(config);
  if (pretrain) tc.objective = ObjectiveMode::kVanilla;
  Json resolved = config;
  if (pretrain) resolved["objective"] = "vanilla";
  // Fail on a missing cache before anything is created.
  if (tc.objective != ObjectiveMode::kVanilla) read_centroid_cache(centroid_dir(config));
  const fs::path dir = path_in(config, "out_dir");
  OutputGuard guard(force_of(args));
  guard.claim(dir);
  fs::create_directories(dir);
  write_json(dir / "config.json", resolved);
  Json report = run_training(resolved, tc, dir, log);
  guard.commit();
  return report;
}

Json cmd_gen_centroids(const Json& config, const Json& args, const LogFn& log) {
  const fs::path teacher_path = path_in(config, "teacher");
  if (teacher_path.empty()) fail(ErrorCode::kInvalidArgument, "missing required --teacher");
  const Checkpoint info = load_model(teacher_path, config);
  const Model& teacher = info.model;
  const DatasetManifest manifest = read_manifest(path_in(config, "data_dir"));
  check_scale(manifest, config);
  const fs::path dir = centroid_dir(config);
  OutputGuard guard(force_of(args));
  guard.claim(dir);
  const CentroidCache cache = generate_centroids(manifest, teacher, info.hash, dir, true);
  write_json(dir / "config.json", config);
  guard.commit();
  if (log) log("wrote " + std::to_string(cache.files.size()) + " centroids to " + dir.string());
  return Json{{"centroid_dir", dir.string()}, {"teacher_hash", cache.teacher_hash}, {"items", cache.files.size()}};
}

Json cmd_eval(const Json& config, const Json& args, const LogFn& log) {
  const fs::path ckpt = required_arg(args, "ckpt", "--ckpt");
  if (path_in(config, "val_dir").empty()) fail(ErrorCode::kInvalidArgument, "missing required --val-dir");
  const Model model = load_model(ckpt, config).model;
  const bool residual = parse_objective(config["objective"].get<std::string>()) == ObjectiveMode::kResidualRegression;
  const std::vector<DatasetItem> val = load_val_items(config, residual);
  const EvalResult ev = evaluate(model, val, config["dataset"]["scale"].get<int>(), residual);

  std::ostringstream csv;
  csv << "id,psnr,ssim\n";
  Json rows = Json::array();
  for (const auto& item : ev.items) {
    const double p = std::min(item.psnr, kPsnrCsvCap);
    csv << item.id << ',' << csv_double(p) << ',' << csv_double(item.ssim) << '\n';
    rows.push_back({{"id", item.id}, {"psnr", p}, {"ssim", item.ssim}});
  }
  csv << "mean," << csv_double(std::min(ev.mean_psnr, kPsnrCsvCap)) << ',' << csv_double(ev.mean_ssim) << '\n';
  const std::string out = arg_string(args, "out");
  if (!out.empty()) {
    OutputGuard guard(force_of(args));
    guard.claim(out);
    guard.claim(out + ".config.json");
    write_text(out, csv.str());
    write_json(out + ".config.json", config);
    guard.commit();
  }
  if (log) log(csv.str());
  return Json{{"items", rows},
              {"mean_psnr", std::min(ev.mean_psnr, kPsnrCsvCap)},
              {"mean_ssim", ev.mean_ssim},
              {"csv", csv.str()}};
}

Json cmd_probe(const Json& config, const Json& args, const LogFn& log) {
  const fs::path ckpt = required_arg(args, "ckpt", "--ckpt");
  const Checkpoint info = load_model(ckpt, config);
  const Model& model = info.model;
  const TrainConfig tc = train_config_from(config);
  std::vector<DatasetItem> items = load_training_items(config, tc.objective != ObjectiveMode::kVanilla);
  const PairSource pairs = make_pair_source(tc, items, model.config().scale, resize_spec_from(config));
  const std::vector<double> etas = tc.probe_etas.empty() ? default_probe_etas(tc.lr0) : tc.probe_etas;
  const long batches = config["probe"]["batches"].get<long>();
  require(batches >= 1, ErrorCode::kConfig, "probe.batches must be >= 1");

  const fs::path dir = path_in(config, "out_dir");
  OutputGuard guard(force_of(args));
  guard.claim(dir / "probe.csv");
  guard.claim(dir / "probe.config.json");
  std::vector<ProbeReport> reports;
  Json summary = Json::array();
  for (long b = 0; b < batches; ++b) {
    const long step = std::min(info.step + b, tc.total_steps - 1);
    const double alpha =
        tc.objective == ObjectiveMode::kVanilla ? 1.0 : alpha_at(tc.alpha, step, tc.total_steps);
    const std::vector<TrainingPair> batch_pairs = pairs(step, alpha);
    reports.push_back(landscape_probe(model, make_batch(batch_pairs), etas, tc.loss, step));
    const ProbeReport& r = reports.back();
    summary.push_back({{"step", step}, {"alpha", alpha}, {"baseline_loss", r.baseline_loss},
                       {"max_grad_diff", r.max_grad_diff}, {"losses_along_ray", r.losses_along_ray}});
    if (log) log("step " + std::to_string(step) + " max_grad_diff " + csv_double(r.max_grad_diff));
  }
  write_text(dir / "probe.csv", probes_csv(reports));
  write_json(dir / "probe.config.json", config);
  guard.commit();
  return Json{{"csv", (dir / "probe.csv").string()}, {"etas", etas}, {"probes", summary}};
}

Image log_heatmap(const Image& magnitude) {
  Image out(magnitude.height(), magnitude.width(), 1);
  double lo = INFINITY, hi = -INFINITY;
  for (float v : magnitude.data()) {
    const double l = std::log1p(static_cast<double>(v));
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  auto src = magnitude.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = static_cast<float>((std::log1p(static_cast<double>(src[i])) - lo) / span);
  }
  return out;
}

TrainingPair full_image_pair(const DatasetItem& item, ObjectiveMode mode, double alpha, int scale,
                             const ResizeSpec& spec) {
  switch (mode) {
    case ObjectiveMode::kVanilla: return vanilla_pair(item.lr, item.hr, scale);
    case ObjectiveMode::kKd: return kd_pair(item.lr, item.centroid, scale);
    case ObjectiveMode::kEco: return eco_pair(item.hr, item.centroid, static_cast<float>(alpha), spec);
    case ObjectiveMode::kResidualRegression: return residual_pair(item.lr, item.hr, item.centroid, scale);
  }
  fail(ErrorCode::kInternal, "unhandled objective");
}

Json cmd_spectrum(const Json& config, const Json& args, const LogFn& log) {
  const fs::path ckpt = required_arg(args, "ckpt", "--ckpt");
  const std::string id = required_arg(args, "item", "--item");
  const double alpha = arg_value<double>(args, "alpha", 0.0);
  require(alpha >= 0.0 && alpha <= 1.0, ErrorCode::kInvalidArgument, "--alpha must be in [0, 1]");
  const Model model = load_model(ckpt, config).model;
  const ObjectiveMode mode = parse_objective(config["objective"].get<std::string>());
  const std::vector<DatasetItem> items = load_training_items(config, mode != ObjectiveMode::kVanilla);
  const DatasetItem& item = find_item(items, id);
  const TrainingPair pair = full_image_pair(item, mode, alpha, model.config().scale, resize_spec_from(config));
  const SpectrumReport report = gradient_spectrum(model, pair);
  const double top = top_band_fraction(report.profile);

  const fs::path dir = path_in(config, "out_dir");
  const std::string stem = "spectrum_" + id;
  OutputGuard guard(force_of(args));
  for (const char* ext : {".csv", ".ecot", ".png", ".config.json"}) guard.claim(dir / (stem + ext));
  std::ostringstream csv;
  csv << "radius,magnitude\n";
  for (std::size_t r = 0; r < report.profile.size(); ++r) csv << r << ',' << csv_double(report.profile[r]) << '\n';
  write_text(dir / (stem + ".csv"), csv.str());
  write_ecot(dir / (stem + ".ecot"), report.magnitude);
  write_png(dir / (stem + ".png"), log_heatmap(report.magnitude));
  write_json(dir / (stem + ".config.json"), config);
  guard.commit();
  if (log) log(id + " top-quartile fraction " + csv_double(top));
  return Json{{"item", id},
              {"objective", to_string(mode)},
              {"alpha", alpha},
              {"top_quartile_fraction", top},
              {"profile", report.profile},
              {"csv", (dir / (stem + ".csv")).string()}};
}

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
  std::vector<int> values;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      values.push_back(v);
    } catch (const std::exception&) {
      fail(ErrorCode::kInvalidArgument, std::string("bad ") + flag + " entry '" + part + "'");
    }
  }
  if (values.empty()) fail(ErrorCode::kInvalidArgument, std::string("empty ") + flag);
  return values;
}

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      values.push_back(v);
    } catch (const std::exception&) {
      fail(ErrorCode::kInvalidArgument, std::string("bad ") + flag + " entry '" + part + "'");
    }
  }
  if (values.empty()) fail(ErrorCode::kInvalidArgument, std::string("empty ") + flag);
  return values;
}

Json cmd_sweep_batch(const Json& config, const Json& args, const LogFn& log) {
  const std::vector<int> sizes = parse_int_list(arg_string(args, "sizes", "2,4,8,16"), "--sizes");
  for (int b : sizes) require(b >= 1, ErrorCode::kInvalidArgument, "--sizes entries must be >= 1");
  TrainConfig tc = train_config_from(config);
  if (tc.objective != ObjectiveMode::kVanilla) read_centroid_cache(centroid_dir(config));
  const fs::path dir = path_in(config, "out_dir");
  OutputGuard guard(force_of(args));
  guard.claim(dir);
  fs::create_directories(dir);
  write_json(dir / "config.json", config);
  Json runs = Json::array();
  for (int b : sizes) {
    if (log) log("batch size " + std::to_string(b));
    tc.batch_size = b;
    Json resolved = config;
    resolved["train"]["batch_size"] = b;
    const fs::path run_dir = dir / ("batch_" + std::to_string(b));
    fs::create_directories(run_dir);
    write_json(run_dir / "config.json", resolved);
    Json report = run_training(resolved, tc, run_dir, log);
    report["batch_size"] = b;
    runs.push_back(report);
  }
  guard.commit();
  return Json{{"out_dir", dir.string()}, {"runs", runs}};
}

Image hconcat(const std::vector<Image>& tiles) {
  int width = 0;
  for (const auto& t : tiles) {
    require(t.height() == tiles.front().height() && t.channels() == tiles.front().channels(), ErrorCode::kShape,
            "strip tiles must share height and channels");
    width += t.width();
  }
  Image out(tiles.front().height(), width, tiles.front().channels());
  int x0 = 0;
  for (const auto& t : tiles) {
    for (int y = 0; y < t.height(); ++y)
      for (int x = 0; x < t.width(); ++x)
        for (int c = 0; c < t.channels(); ++c) out.at(y, x0 + x, c) = t.at(y, x, c);
    x0 += t.width();
  }
  return out;
}

Json cmd_target_dump(const Json& config, const Json& args, const LogFn& log) {
  const std::string id = required_arg(args, "item", "--item");
  const std::vector<double> alphas = parse_double_list(arg_string(args, "alphas", "0,0.25,0.5,0.75,1"), "--alphas");
  for (double a : alphas) require(a >= 0.0 && a <= 1.0, ErrorCode::kInvalidArgument, "--alphas must lie in [0, 1]");
  const std::vector<DatasetItem> items = load_training_items(config, true);
  const DatasetItem& item = find_item(items, id);
  std::vector<Image> tiles;
  for (double a : alphas) tiles.push_back(lerp(item.centroid, item.hr, static_cast<float>(a)).clamped());

  const fs::path dir = path_in(config, "out_dir");
  const fs::path out = dir / ("targets_" + id + ".png");
  OutputGuard guard(force_of(args));
  guard.claim(out);
  guard.claim(dir / ("targets_" + id + ".config.json"));
  write_png(out, hconcat(tiles));
  write_json(dir / ("targets_" + id + ".config.json"), config);
  guard.commit();
  if (log) log("wrote " + out.string());
  return Json{{"out", out.string()}, {"alphas", alphas}};
}

Json cmd_oracle_check(const Json& config, const Json& args, const LogFn& log) {
  const int k = arg_value<int>(args, "k", 16);
  const int trials = arg_value<int>(args, "trials", 1000);
  const double amp = arg_value<double>(args, "amp", 0.2);
  const int size = arg_value<int>(args, "size", 16);
  const long steps = arg_value<long>(args, "steps", 500);
  require(trials >= 0 && steps >= 1, ErrorCode::kInvalidArgument, "--trials must be >= 0 and --steps >= 1");
  ModelConfig mc = model_config_from(config);
  const int s = mc.scale;
  require(size >= 1, ErrorCode::kInvalidArgument, "--size must be >= 1");
  const std::uint64_t seed = config["seed"].get<std::uint64_t>();

  Rng rng(seed, 1);
  Image x(size, size, 3);
  for (float& v : x.data()) v = static_cast<float>(rng.uniform(0.2, 0.8));
  const PosteriorSample sample = make_posterior(x, s, k, amp, rng);
  int violations = 0;
  double worst_gap = -INFINITY;
  for (int t = 0; t < trials; ++t) {
    Image c(size * s, size * s, 3);
    for (float& v : c.data()) v = static_cast<float>(rng.uniform(0.0, 1.0));
    const JensenCheck j = check_jensen(sample, c);
    worst_gap = std::max(worst_gap, j.rhs - j.lhs);
    if (j.rhs > j.lhs + 1e-6) ++violations;
  }
  PosteriorTrainingConfig pc;
  pc.steps = steps;
  pc.seed = seed;
  const PosteriorTrainingReport tr = posterior_training_check(sample, mc, pc);
  Json curve = Json::array();
  for (const auto& [step, d] : tr.distance_curve) curve.push_back({step, d});
  Json report{{"k", k},
              {"noise_amp", amp},
              {"jensen_trials", trials},
              {"violations", violations},
              {"mean_eps_norm", mean_eps_norm(sample)},
              {"max_abs_mean_eps", max_abs_mean_eps(sample)},
              {"training_distance_curve", curve},
              {"initial_distance", tr.initial_distance},
              {"final_distance", tr.final_distance},
              {"final_distance_to_farthest", tr.final_distance_to_farthest}};
  if (trials > 0) report["max_jensen_gap"] = worst_gap;
  const std::string out = arg_string(args, "out");
  if (!out.empty()) {
    OutputGuard guard(force_of(args));
    guard.claim(out);
    guard.claim(out + ".config.json");
    write_json(out, report);
    write_json(out + ".config.json", config);
    guard.commit();
  }
  if (log) log("violations " + std::to_string(violations) + " of " + std::to_string(trials));
  return report;
}

Json cmd_resize(const Json& config, const Json& args, const LogFn& log) {
  const fs::path in = required_arg(args, "in", "--in");
  const fs::path out = required_arg(args, "out", "--out");
  const ResizeSpec spec = ResizeSpec::parse(required_arg(args, "scale", "--scale"),
                                            config["dataset"]["antialias"].get<bool>(),
                                            config["dataset"]["kernel_a"].get<double>());
  const Image img = read_png(in);
  const Image resized = resize(img, spec);
  OutputGuard guard(force_of(args));
  guard.claim(out);
  guard.claim(out.string() + ".config.json");
  write_png(out, resized);
  write_json(out.string() + ".config.json", config);
  guard.commit();
  if (log) log("wrote " + out.string());
  return Json{{"out", out.string()}, {"height", resized.height()}, {"width", resized.width()}};
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"prepare-data", "pretrain", "gen-centroids", "train",
                                              "eval", "probe", "spectrum", "sweep-batch", "target-dump",
                                              "oracle-check", "resize", "synth-data"};
  return names;
}

Json run_command(const std::string& command, const Json& config, const Json& args, const LogFn& log) {
  const Json a = args.is_null() ? Json::object() : args;
  if (!a.is_object()) fail(ErrorCode::kInvalidArgument, "command arguments must be a JSON object");
  if (command == "prepare-data") return cmd_prepare_data(config, a, log);
  if (command == "pretrain") return cmd_train(config, a, log, true);
  if (command == "gen-centroids") return cmd_gen_centroids(config, a, log);
  if (command == "train") return cmd_train(config, a, log, false);
  if (command == "eval") return cmd_eval(config, a, log);
  if (command == "probe") return cmd_probe(config, a, log);
  if (command == "spectrum") return cmd_spectrum(config, a, log);
  if (command == "sweep-batch") return cmd_sweep_batch(config, a, log);
  if (command == "target-dump") return cmd_target_dump(config, a, log);
  if (command == "oracle-check") return cmd_oracle_check(config, a, log);
  if (command == "resize") return cmd_resize(config, a, log);
  if (command == "synth-data") return cmd_synth_data(config, a, log);
  fail(ErrorCode::kInvalidArgument, "unknown command '" + command + "'");
}

}  // namespace eco
