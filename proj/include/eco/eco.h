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

/* C interface to the eco super-resolution library. All functions return an
   eco_status; on failure eco_last_error() describes the cause for the
   calling thread. Strings returned through out-parameters are owned by the
   caller and released with eco_string_free. */

#ifndef ECO_ECO_H
#define ECO_ECO_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define ECO_API __attribute__((visibility("default")))
#else
#define ECO_API
#endif

typedef enum eco_status {
  ECO_OK = 0,
  ECO_INVALID_ARGUMENT = 1,
  ECO_SHAPE = 2,
  ECO_IO = 3,
  ECO_STATE = 4,
  ECO_NUMERIC = 5,
  ECO_CONFIG = 6,
  ECO_INTERNAL = 7
} eco_status;

typedef struct eco_image eco_image;
typedef struct eco_model eco_model;

typedef void (*eco_log_fn)(const char* line, void* user);

ECO_API const char* eco_version(void);
ECO_API const char* eco_last_error(void);
ECO_API void eco_string_free(char* s);

/* Images are height x width x channels floats, channel-last. */
ECO_API eco_status eco_image_create(int height, int width, int channels, const float* data, eco_image** out);
ECO_API eco_status eco_image_read_png(const char* path, eco_image** out);
ECO_API eco_status eco_image_write_png(const eco_image* img, const char* path);
ECO_API eco_status eco_image_read_ecot(const char* path, eco_image** out);
ECO_API eco_status eco_image_write_ecot(const eco_image* img, const char* path);
ECO_API eco_status eco_image_extents(const eco_image* img, int* height, int* width, int* channels);
ECO_API const float* eco_image_data(const eco_image* img);
ECO_API void eco_image_destroy(eco_image* img);

/* scale: "p/q" or a decimal ratio of output to input size. */
ECO_API eco_status eco_resize(const eco_image* img, const char* scale, int antialias, double kernel_a,
                              eco_image** out);
ECO_API eco_status eco_rgb_to_y(const eco_image* img, eco_image** out);
ECO_API eco_status eco_psnr(const eco_image* a, const eco_image* b, int border, double* out);
ECO_API eco_status eco_ssim(const eco_image* a, const eco_image* b, double* out);

ECO_API eco_status eco_model_load(const char* checkpoint, eco_model** out);
ECO_API eco_status eco_model_scale(const eco_model* model, int* scale);
ECO_API eco_status eco_model_forward(const eco_model* model, const eco_image* lr, eco_image** out);
ECO_API void eco_model_destroy(eco_model* model);

/* JSON experiment config: defaults, then file_json, then overrides_json.
   Either input may be NULL. */
ECO_API eco_status eco_config_default(char** out_json);
ECO_API eco_status eco_config_resolve(const char* file_json, const char* overrides_json, char** out_json);

/* Runs a workflow command on a resolved config. args_json may be NULL.
   The report is a JSON document. */
ECO_API eco_status eco_run(const char* command, const char* config_json, const char* args_json,
                           eco_log_fn log, void* user, char** report_json);

#ifdef __cplusplus
}
#endif

#endif
