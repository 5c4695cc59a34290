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

#include "argue/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>

#include "argue/error.hpp"
#include "argue/io.hpp"

namespace argue {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  fail(ErrorKind::InvalidConfig, "bad value '" + std::string(value) + "' for " + std::string(key));
}

double to_double(std::string_view key, std::string_view v) {
  const std::string s(v);
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(s, &used);
  } catch (const std::exception&) {
    bad_value(key, v);
  }
  if (used != s.size()) bad_value(key, v);
  return d;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, v);
  return out;
}

// Shortest of %.15g / %.17g that reads back to the same double.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Setter = std::function<void(LabConfig&, std::string_view key, std::string_view)>;
using Getter = std::function<std::string(const LabConfig&)>;
struct Field {
  Setter set;
  Getter get;
};

template <class T>
Field size_field(T LabConfig::*group, std::size_t T::*member) {
  return {[=](LabConfig& c, std::string_view k, std::string_view v) {
            (c.*group).*member = static_cast<std::size_t>(to_uint(k, v));
          },
          [=](const LabConfig& c) { return std::to_string((c.*group).*member); }};
}

template <class T>
Field double_field(T LabConfig::*group, double T::*member) {
  return {[=](LabConfig& c, std::string_view k, std::string_view v) {
            (c.*group).*member = to_double(k, v);
          },
          [=](const LabConfig& c) { return fmt((c.*group).*member); }};
}

template <class T>
Field seed_field(T LabConfig::*group, std::uint64_t T::*member) {
  return {[=](LabConfig& c, std::string_view k, std::string_view v) {
            (c.*group).*member = to_uint(k, v);
          },
          [=](const LabConfig& c) { return std::to_string((c.*group).*member); }};
}

Field string_field(std::string TrainConfig::*member) {
  return {[=](LabConfig& c, std::string_view, std::string_view v) { c.train.*member = v; },
          [=](const LabConfig& c) { return c.train.*member; }};
}

const std::map<std::string, Field, std::less<>>& fields() {
  using T = TrainConfig;
  using S = TaskSpec;
  static const std::map<std::string, Field, std::less<>> table{
      {"train.epochs", size_field(&LabConfig::train, &T::epochs)},
      {"train.batch_size", size_field(&LabConfig::train, &T::batch_size)},
      {"train.lr", double_field(&LabConfig::train, &T::learning_rate)},
      {"train.momentum", double_field(&LabConfig::train, &T::momentum)},
      {"train.seed", seed_field(&LabConfig::train, &T::seed)},
      {"train.shots", size_field(&LabConfig::train, &T::shots)},
      {"train.mode",
       {[](LabConfig& c, std::string_view, std::string_view v) { c.train.mode = parse_mode(v); },
        [](const LabConfig& c) { return std::string(to_string(c.train.mode)); }}},
      {"train.negative",
       {[](LabConfig& c, std::string_view, std::string_view v) {
          c.train.negative = parse_negative_kind(v);
        },
        [](const LabConfig& c) { return std::string(to_string(c.train.negative)); }}},
      {"prompt.M", size_field(&LabConfig::train, &T::M)},
      {"prompt.init_phrase", string_field(&T::init_phrase)},
      {"prompt.template", string_field(&T::template_text)},
      {"loss.tau", double_field(&LabConfig::train, &T::tau)},
      {"loss.beta", double_field(&LabConfig::train, &T::beta)},
      {"loss.gamma", double_field(&LabConfig::train, &T::gamma)},
      {"attribute.clusters", size_field(&LabConfig::train, &T::clusters)},
      {"task.classes", size_field(&LabConfig::task, &S::classes)},
      {"task.base_fraction", double_field(&LabConfig::task, &S::base_fraction)},
      {"task.shots", size_field(&LabConfig::task, &S::shots)},
      {"task.rho", double_field(&LabConfig::task, &S::rho)},
      {"task.core_dim", size_field(&LabConfig::task, &S::core_dim)},
      {"task.spurious_dim", size_field(&LabConfig::task, &S::spurious_dim)},
      {"task.feature_dim", size_field(&LabConfig::task, &S::feature_dim)},
      {"task.noise_std", double_field(&LabConfig::task, &S::noise_std)},
      {"task.attributes", size_field(&LabConfig::task, &S::attributes)},
      {"task.sharing", size_field(&LabConfig::task, &S::sharing)},
      {"task.aspects", size_field(&LabConfig::task, &S::aspects)},
      {"task.nonvisual", size_field(&LabConfig::task, &S::nonvisual)},
      {"task.wrong_signature", size_field(&LabConfig::task, &S::wrong_signature)},
      {"task.test_per_class", size_field(&LabConfig::task, &S::test_per_class)},
      {"task.d_tok", size_field(&LabConfig::task, &S::d_tok)},
      {"task.embed_dim", size_field(&LabConfig::task, &S::embed_dim)},
      {"task.max_length", size_field(&LabConfig::task, &S::max_length)},
      {"task.name_core", double_field(&LabConfig::task, &S::name_core)},
      {"task.name_signature", double_field(&LabConfig::task, &S::name_signature)},
      {"task.distractor_mix", double_field(&LabConfig::task, &S::distractor_mix)},
      {"task.perturbation", double_field(&LabConfig::task, &S::perturbation)},
      {"task.template_norm", double_field(&LabConfig::task, &S::template_norm)},
      {"task.token_norm", double_field(&LabConfig::task, &S::token_norm)},
      {"task.noise_boost", double_field(&LabConfig::task, &S::noise_boost)},
      {"task.seed", seed_field(&LabConfig::task, &S::seed)},
  };
  return table;
}

}  // namespace

void apply_setting(LabConfig& config, std::string_view key, std::string_view value) {
  const auto it = fields().find(key);
  if (it == fields().end()) fail(ErrorKind::InvalidConfig, "unknown key '" + std::string(key) + "'");
  try {
    it->second.set(config, key, value);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidConfig) throw;
    fail(ErrorKind::InvalidConfig, std::string(key) + ": " + e.what());
  }
}

LabConfig parse_config(std::string_view text, LabConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  base.train.validate();
  base.task.validate();
  return base;
}

LabConfig load_config(const std::filesystem::path& path, LabConfig base) {
  return parse_config(read_text(path), std::move(base));
}

std::string config_to_text(const LabConfig& config) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + " = " + field.get(config) + "\n";
  return out;
}

}  // namespace argue
