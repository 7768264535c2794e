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

#include <functional>
#include <string>

#include <nlohmann/json.hpp>

#include "eco/model.hpp"
#include "eco/pipeline.hpp"
#include "eco/trainer.hpp"

namespace eco {

using Json = nlohmann::json;
using LogFn = std::function<void(const std::string&)>;

// Every key the experiment config accepts, with its default value.
Json default_config();

// Layers `file` and then `overrides` onto the defaults. Keys unknown to the
// defaults, or values of the wrong JSON type, are rejected.
Json resolve_config(const Json& file, const Json& overrides);

ModelConfig model_config_from(const Json& config);
TrainConfig train_config_from(const Json& config);
ResizeSpec resize_spec_from(const Json& config);

// Runs one subcommand. `args` holds per-invocation inputs (checkpoint
// paths, item ids, --force). Returns a JSON report.
Json run_command(const std::string& command, const Json& config, const Json& args,
                 const LogFn& log = {});

const std::vector<std::string>& command_names();

}  // namespace eco
