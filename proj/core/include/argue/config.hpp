// ----------------------------------------------------------------------------
// Copyright 2026 The ArgueLab Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ----------------------------------------------------------------------------

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "argue/synthbench.hpp"
#include "argue/train.hpp"

namespace argue {

// Run configuration as read from a `key = value` file. Blank lines and `#`
// comments are ignored; keys are grouped as train.*, prompt.*, loss.*,
// attribute.* and task.*.
struct LabConfig {
  TrainConfig train;
  TaskSpec task;
};

// Applies one key. Unknown keys and unparsable values raise InvalidConfig.
void apply_setting(LabConfig& config, std::string_view key, std::string_view value);
LabConfig parse_config(std::string_view text, LabConfig base = {});
LabConfig load_config(const std::filesystem::path& path, LabConfig base = {});

// Canonical dump that parse_config reads back into an equal config.
std::string config_to_text(const LabConfig& config);

}  // namespace argue
