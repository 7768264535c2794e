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

// eco: command-line front end over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eco/eco.h"

using Json = nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { eco_string_free(s); }
};

// A flag whose value lands at `pointer` in the config overrides. The JSON
// type is taken from the default config.
struct ConfigFlag {
  std::string pointer;
  std::string value;
  CLI::Option* option = nullptr;
};

// A boolean flag pair such as --antialias / --no-antialias.
struct ConfigSwitch {
  std::string pointer;
  CLI::Option* on = nullptr;
  CLI::Option* off = nullptr;
};

struct Command {
  CLI::App* app = nullptr;
  std::string name;
  std::string config_file;
  bool force = false;
  std::vector<std::unique_ptr<ConfigFlag>> flags;
  std::vector<std::unique_ptr<ConfigSwitch>> switches;
  std::map<std::string, std::string> args;  // json key -> raw value
  std::map<std::string, CLI::Option*> arg_options;
  std::map<std::string, char> arg_types;  // s string, i integer, d number

  void flag(const std::string& name, const std::string& pointer, const std::string& help) {
    auto f = std::make_unique<ConfigFlag>();
    f->pointer = pointer;
    f->option = app->add_option(name, f->value, help + " [" + pointer.substr(1) + "]");
    flags.push_back(std::move(f));
  }

  void toggle(const std::string& on, const std::string& off, const std::string& pointer, const std::string& help) {
    auto s = std::make_unique<ConfigSwitch>();
    s->pointer = pointer;
    if (!on.empty()) s->on = app->add_flag(on)->description(help + " [" + pointer.substr(1) + "]");
    if (!off.empty()) s->off = app->add_flag(off)->description("negate " + (on.empty() ? pointer.substr(1) : on));
    if (s->on && s->off) s->on->excludes(s->off);
    switches.push_back(std::move(s));
  }

  void arg(const std::string& name, const std::string& key, char type, const std::string& help) {
    arg_options[key] = app->add_option(name, args[key], help);
    arg_types[key] = type;
  }
};

void add_dataset_flags(Command& c, bool with_scale) {
  c.flag("--hr-dir", "/dataset/hr_dir", "directory of HR PNG images");
  if (with_scale) c.flag("--scale", "/dataset/scale", "integer SR factor");
  c.toggle("--antialias", "--no-antialias", "/dataset/antialias", "antialias when downscaling");
  c.flag("--kernel-a", "/dataset/kernel_a", "cubic kernel parameter");
  c.flag("--lr-patch", "/dataset/lr_patch", "training patch size in LR pixels");
  c.toggle("", "--no-augment", "/dataset/augment", "dihedral augmentation");
}

void add_model_flags(Command& c) {
  c.flag("--channels", "/model/channels", "feature channels");
  c.flag("--blocks", "/model/n_blocks", "residual blocks");
  c.flag("--residual-scaling", "/model/residual_scaling", "residual branch scale");
}

void add_train_flags(Command& c) {
  c.flag("--steps", "/train/total_steps", "total optimizer steps");
  c.flag("--batch", "/train/batch_size", "mini-batch size");
  c.flag("--lr", "/train/lr0", "initial learning rate (cosine annealed)");
  c.flag("--loss", "/train/loss", "l1 or l2");
  c.flag("--eval-every", "/train/eval_every", "validation interval in steps (0: final only)");
  c.flag("--checkpoint-every", "/train/checkpoint_every", "intermediate checkpoint interval (0: none)");
  c.flag("--stop-at", "/train/stop_at", "stop after this many steps of the schedule (-1: all)");
  c.flag("--objective", "/objective", "vanilla, kd, eco or residual");
  c.flag("--alpha-schedule", "/alpha_schedule/kind", "constant, linear_ramp, step or cosine_ramp");
  c.flag("--ramp-end", "/alpha_schedule/ramp_end_fraction", "fraction of training where alpha reaches its end value");
  c.flag("--alpha-start", "/alpha_schedule/alpha_start", "alpha at step 0");
  c.flag("--alpha-end", "/alpha_schedule/alpha_end", "alpha after the ramp");
  c.flag("--probe-every", "/probe/every", "landscape probe interval (0: off)");
  c.flag("--probe-until", "/probe/until", "last probed step (-1: whole run)");
  c.flag("--probe-etas", "/probe/etas", "comma-separated probe step sizes");
  c.flag("--probe-batches", "/probe/batches", "batches probed by the probe command");
}

void add_path_flags(Command& c) {
  c.flag("--data-dir", "/paths/data_dir", "prepared training dataset");
  c.flag("--val-dir", "/paths/val_dir", "prepared validation dataset");
  c.flag("--centroid-dir", "/paths/centroid_dir", "centroid cache (default DATA_DIR/centroids)");
  c.flag("--val-centroid-dir", "/paths/val_centroid_dir", "validation centroid cache (default VAL_DIR/centroids)");
  c.flag("--teacher", "/paths/teacher", "teacher checkpoint");
  c.flag("--out-dir", "/paths/out_dir", "output directory");
}

Json convert(const std::string& raw, const Json& like, const std::string& what) {
  try {
    std::size_t used = 0;
    if (like.is_number_integer()) {
      const long long v = std::stoll(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
      return v;
    }
    if (like.is_number()) {
      const double v = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
      return v;
    }
    if (like.is_array()) {
      Json list = Json::array();
      std::stringstream ss(raw);
      std::string part;
      while (std::getline(ss, part, ',')) list.push_back(convert(part, 0.0, what));
      return list;
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("invalid value '" + raw + "' for " + what);
  }
  return raw;
}

Json build_overrides(const Command& c, const Json& defaults) {
  Json overrides = Json::object();
  for (const auto& f : c.flags) {
    if (f->option->count() == 0) continue;
    const Json::json_pointer ptr(f->pointer);
    overrides[ptr] = convert(f->value, defaults.at(ptr), f->option->get_name());
  }
  for (const auto& s : c.switches) {
    const Json::json_pointer ptr(s->pointer);
    if (s->on && s->on->count() > 0) overrides[ptr] = true;
    if (s->off && s->off->count() > 0) overrides[ptr] = false;
  }
  return overrides;
}

Json build_args(const Command& c) {
  Json args = Json::object();
  for (const auto& [key, opt] : c.arg_options) {
    if (opt->count() == 0) continue;
    const std::string& raw = c.args.at(key);
    switch (c.arg_types.at(key)) {
      case 'i': args[key] = convert(raw, 0, opt->get_name()); break;
      case 'd': args[key] = convert(raw, 0.0, opt->get_name()); break;
      default: args[key] = raw; break;
    }
  }
  args["force"] = c.force;
  return args;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_log(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

int exit_code_for(eco_status status) {
  return status == ECO_INVALID_ARGUMENT || status == ECO_CONFIG ? kExitUsage : kExitRuntime;
}

int run(const Command& c) {
  OwnedString defaults_text;
  if (eco_config_default(&defaults_text.s) != ECO_OK) {
    std::fprintf(stderr, "error: %s\n", eco_last_error());
    return kExitRuntime;
  }
  const Json defaults = Json::parse(defaults_text.s);
  std::string file_text;
  if (!c.config_file.empty()) file_text = read_text(c.config_file);
  const std::string overrides = build_overrides(c, defaults).dump();
  const std::string args = build_args(c).dump();

  OwnedString config;
  eco_status status =
      eco_config_resolve(file_text.empty() ? nullptr : file_text.c_str(), overrides.c_str(), &config.s);
  if (status != ECO_OK) {
    std::fprintf(stderr, "error: %s\n", eco_last_error());
    return exit_code_for(status);
  }
  OwnedString report;
  status = eco_run(c.name.c_str(), config.s, args.c_str(), print_log, nullptr, &report.s);
  if (status != ECO_OK) {
    std::fprintf(stderr, "error: %s\n", eco_last_error());
    return exit_code_for(status);
  }
  std::printf("%s\n", report.s);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eco: super-resolution training lab"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Command>> commands;
  auto make = [&](const std::string& name, const std::string& help, bool artifact) -> Command& {
    auto c = std::make_unique<Command>();
    c->name = name;
    c->app = app.add_subcommand(name, help);
    c->app->add_option("--config", c->config_file, "JSON experiment config; flags override it");
    if (artifact) c->app->add_flag("--force", c->force, "overwrite existing outputs");
    c->flag("--seed", "/seed", "random seed");
    commands.push_back(std::move(c));
    return *commands.back();
  };

  {
    Command& c = make("synth-data", "write a procedural HR image corpus", true);
    c.arg("--out", "out", 's', "output directory");
    c.arg("--count", "count", 'i', "number of images (default 40)");
    c.arg("--size", "size", 'i', "image side in pixels (default 96)");
  }
  {
    Command& c = make("prepare-data", "crop HR images and build the LR dataset", true);
    add_dataset_flags(c, true);
    c.flag("--data-dir", "/paths/data_dir", "output dataset directory");
  }
  for (const char* name : {"pretrain", "train"}) {
    Command& c = make(name,
                      std::string(name) == "pretrain" ? "train the teacher with the vanilla objective"
                                                      : "train a model with the selected objective",
                      true);
    add_dataset_flags(c, true);
    add_model_flags(c);
    add_train_flags(c);
    add_path_flags(c);
  }
  {
    Command& c = make("gen-centroids", "run a teacher over a dataset and cache its outputs", true);
    c.flag("--scale", "/dataset/scale", "integer SR factor");
    add_path_flags(c);
  }
  {
    Command& c = make("eval", "PSNR/SSIM (Y channel) of a checkpoint on a validation set", true);
    c.arg("--ckpt", "ckpt", 's', "checkpoint to evaluate");
    c.arg("--out", "out", 's', "optional CSV output file");
    c.flag("--scale", "/dataset/scale", "integer SR factor");
    c.flag("--objective", "/objective", "residual decodes outputs against cached centroids");
    add_path_flags(c);
  }
  {
    Command& c = make("probe", "gradient-ray landscape probe of a checkpoint", true);
    c.arg("--ckpt", "ckpt", 's', "checkpoint to probe");
    add_dataset_flags(c, true);
    add_train_flags(c);
    add_path_flags(c);
  }
  {
    Command& c = make("spectrum", "Fourier spectrum of the loss gradient for one item", true);
    c.arg("--ckpt", "ckpt", 's', "checkpoint");
    c.arg("--item", "item", 's', "dataset item id");
    c.arg("--alpha", "alpha", 'd', "blend weight for the eco objective (default 0)");
    add_dataset_flags(c, true);
    c.flag("--objective", "/objective", "vanilla, kd, eco or residual");
    add_path_flags(c);
  }
  {
    Command& c = make("sweep-batch", "train once per mini-batch size", true);
    c.arg("--sizes", "sizes", 's', "comma-separated batch sizes (default 2,4,8,16)");
    add_dataset_flags(c, true);
    add_model_flags(c);
    add_train_flags(c);
    add_path_flags(c);
  }
  {
    Command& c = make("target-dump", "PNG strip of blended targets for one item", true);
    c.arg("--item", "item", 's', "dataset item id");
    c.arg("--alphas", "alphas", 's', "comma-separated blend weights (default 0,0.25,0.5,0.75,1)");
    c.flag("--scale", "/dataset/scale", "integer SR factor");
    add_path_flags(c);
  }
  {
    Command& c = make("oracle-check", "posterior testbed: Jensen bound and centroid convergence", true);
    c.arg("--k", "k", 'i', "posterior samples (default 16)");
    c.arg("--trials", "trials", 'i', "random probe points for the Jensen check (default 1000)");
    c.arg("--amp", "amp", 'd', "null-space noise amplitude (default 0.2)");
    c.arg("--size", "size", 'i', "LR side in pixels (default 16)");
    c.arg("--steps", "steps", 'i', "training steps for the convergence check (default 500)");
    c.arg("--out", "out", 's', "optional JSON report file");
    c.flag("--scale", "/dataset/scale", "integer SR factor");
    add_model_flags(c);
  }
  {
    Command& c = make("resize", "resample a PNG with the cubic resampler", true);
    c.arg("--in", "in", 's', "input PNG");
    c.arg("--out", "out", 's', "output PNG");
    c.arg("--scale", "scale", 's', "output/input ratio, p/q or decimal");
    c.toggle("--antialias", "--no-antialias", "/dataset/antialias", "antialias when downscaling");
    c.flag("--kernel-a", "/dataset/kernel_a", "cubic kernel parameter");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    for (auto& c : commands) {
      if (!c->app->parsed()) continue;
      return run(*c);
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
