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

#include "eco/eco.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "eco/analysis.hpp"
#include "eco/error.hpp"
#include "eco/io.hpp"
#include "eco/model.hpp"
#include "eco/resample.hpp"
#include "eco/workflow.hpp"

struct eco_image {
  eco::Image img;
};

struct eco_model {
  eco::Model model;
};

namespace {

std::string& last_error() {
  thread_local std::string message;
  return message;
}

eco_status set_error(eco_status status, const char* message) {
  last_error() = message;
  return status;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

eco::Json parse_json(const char* text, const char* what) {
  if (!text) return nullptr;
  try {
    return eco::Json::parse(text);
  } catch (const eco::Json::exception& e) {
    eco::fail(eco::ErrorCode::kConfig, std::string(what) + " is not valid JSON: " + e.what());
  }
}

}  // namespace

#define ECO_PROLOGUE \
  try {              \
    last_error().clear();

#define ECO_EPILOGUE                                                          \
  return ECO_OK;                                                              \
  }                                                                           \
  catch (const eco::Error& e) {                                               \
    return set_error(static_cast<eco_status>(e.code()), e.what());            \
  }                                                                           \
  catch (const std::bad_alloc&) {                                             \
    return set_error(ECO_INTERNAL, "out of memory");                          \
  }                                                                           \
  catch (const std::exception& e) {                                           \
    return set_error(ECO_INTERNAL, e.what());                                 \
  }                                                                           \
  catch (...) {                                                               \
    return set_error(ECO_INTERNAL, "unknown error");                          \
  }

#define ECO_CHECK_ARG(cond, message) \
  if (!(cond)) return set_error(ECO_INVALID_ARGUMENT, message)

extern "C" {

const char* eco_version(void) { return "0.1.0"; }

const char* eco_last_error(void) { return last_error().c_str(); }

void eco_string_free(char* s) { std::free(s); }

eco_status eco_image_create(int height, int width, int channels, const float* data, eco_image** out) {
  ECO_CHECK_ARG(out, "out is null");
  ECO_CHECK_ARG(height > 0 && width > 0 && (channels == 1 || channels == 3), "bad image extents");
  ECO_PROLOGUE
  auto* handle = new eco_image{eco::Image(height, width, channels)};
  if (data) std::memcpy(handle->img.data().data(), data, handle->img.size() * sizeof(float));
  *out = handle;
  ECO_EPILOGUE
}

eco_status eco_image_read_png(const char* path, eco_image** out) {
  ECO_CHECK_ARG(path && out, "null argument");
  ECO_PROLOGUE
  *out = new eco_image{eco::read_png(path)};
  ECO_EPILOGUE
}

eco_status eco_image_write_png(const eco_image* img, const char* path) {
  ECO_CHECK_ARG(img && path, "null argument");
  ECO_PROLOGUE
  eco::write_png(path, img->img);
  ECO_EPILOGUE
}

eco_status eco_image_read_ecot(const char* path, eco_image** out) {
  ECO_CHECK_ARG(path && out, "null argument");
  ECO_PROLOGUE
  *out = new eco_image{eco::read_ecot(path)};
  ECO_EPILOGUE
}

eco_status eco_image_write_ecot(const eco_image* img, const char* path) {
  ECO_CHECK_ARG(img && path, "null argument");
  ECO_PROLOGUE
  eco::write_ecot(path, img->img);
  ECO_EPILOGUE
}

eco_status eco_image_extents(const eco_image* img, int* height, int* width, int* channels) {
  ECO_CHECK_ARG(img, "image is null");
  if (height) *height = img->img.height();
  if (width) *width = img->img.width();
  if (channels) *channels = img->img.channels();
  return ECO_OK;
}

const float* eco_image_data(const eco_image* img) { return img ? img->img.data().data() : nullptr; }

void eco_image_destroy(eco_image* img) { delete img; }

eco_status eco_resize(const eco_image* img, const char* scale, int antialias, double kernel_a, eco_image** out) {
  ECO_CHECK_ARG(img && scale && out, "null argument");
  ECO_PROLOGUE
  const eco::ResizeSpec spec = eco::ResizeSpec::parse(scale, antialias != 0, kernel_a);
  *out = new eco_image{eco::resize(img->img, spec)};
  ECO_EPILOGUE
}

eco_status eco_rgb_to_y(const eco_image* img, eco_image** out) {
  ECO_CHECK_ARG(img && out, "null argument");
  ECO_PROLOGUE
  *out = new eco_image{eco::rgb_to_y(img->img)};
  ECO_EPILOGUE
}

eco_status eco_psnr(const eco_image* a, const eco_image* b, int border, double* out) {
  ECO_CHECK_ARG(a && b && out, "null argument");
  ECO_PROLOGUE
  *out = eco::psnr(a->img, b->img, border);
  ECO_EPILOGUE
}

eco_status eco_ssim(const eco_image* a, const eco_image* b, double* out) {
  ECO_CHECK_ARG(a && b && out, "null argument");
  ECO_PROLOGUE
  *out = eco::ssim(a->img, b->img);
  ECO_EPILOGUE
}

eco_status eco_model_load(const char* checkpoint, eco_model** out) {
  ECO_CHECK_ARG(checkpoint && out, "null argument");
  ECO_PROLOGUE
  *out = new eco_model{eco::load_checkpoint(checkpoint).model};
  ECO_EPILOGUE
}

eco_status eco_model_scale(const eco_model* model, int* scale) {
  ECO_CHECK_ARG(model && scale, "null argument");
  *scale = model->model.config().scale;
  return ECO_OK;
}

eco_status eco_model_forward(const eco_model* model, const eco_image* lr, eco_image** out) {
  ECO_CHECK_ARG(model && lr && out, "null argument");
  ECO_PROLOGUE
  *out = new eco_image{model->model.infer(lr->img).clamped()};
  ECO_EPILOGUE
}

void eco_model_destroy(eco_model* model) { delete model; }

eco_status eco_config_default(char** out_json) {
  ECO_CHECK_ARG(out_json, "out is null");
  ECO_PROLOGUE
  *out_json = dup_string(eco::default_config().dump(2));
  ECO_EPILOGUE
}

eco_status eco_config_resolve(const char* file_json, const char* overrides_json, char** out_json) {
  ECO_CHECK_ARG(out_json, "out is null");
  ECO_PROLOGUE
  const eco::Json config =
      eco::resolve_config(parse_json(file_json, "config file"), parse_json(overrides_json, "overrides"));
  *out_json = dup_string(config.dump(2));
  ECO_EPILOGUE
}

eco_status eco_run(const char* command, const char* config_json, const char* args_json, eco_log_fn log,
                   void* user, char** report_json) {
  ECO_CHECK_ARG(command && config_json && report_json, "null argument");
  ECO_PROLOGUE
  // Re-resolving rejects configs that did not come from eco_config_resolve.
  const eco::Json config = eco::resolve_config(parse_json(config_json, "config"), nullptr);
  eco::LogFn sink;
  if (log) sink = [log, user](const std::string& line) { log(line.c_str(), user); };
  const eco::Json report = eco::run_command(command, config, parse_json(args_json, "arguments"), sink);
  *report_json = dup_string(report.dump(2));
  ECO_EPILOGUE
}

}  // extern "C"
