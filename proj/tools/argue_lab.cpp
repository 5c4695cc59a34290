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

// argue_lab: generate synthetic tasks, sample attributes, train, evaluate and
// sweep. Every command writes manifest.json next to its outputs; failures end
// in one "error: <Kind>: message" line on stderr and a nonzero exit code.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "argue/config.hpp"
#include "argue/error.hpp"
#include "argue/io.hpp"
#include "argue/train.hpp"

#ifndef ARGUE_VERSION
#define ARGUE_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace argue;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Inputs are hashed when opened, outputs when the command finishes.
class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> argv)
      : command_(std::move(command)), argv_(std::move(argv)), started_(utc_now()) {}

  void input(const fs::path& p) { inputs_.push_back(p); }
  void output(const fs::path& p) { outputs_.push_back(p); }
  void config(const LabConfig& c) { config_ = config_to_text(c); }

  void write(const fs::path& where) const {
    json j;
    j["tool"] = "argue_lab";
    j["version"] = ARGUE_VERSION;
    j["command"] = command_;
    j["argv"] = argv_;
    json cfg = json::object();
    std::stringstream ss(config_);
    for (std::string line; std::getline(ss, line);) {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos) cfg[line.substr(0, eq)] = line.substr(eq + 3);
    }
    j["config"] = cfg;
    auto files = [](const std::vector<fs::path>& ps) {
      json arr = json::array();
      for (const auto& p : ps) arr.push_back({{"path", p.string()}, {"sha256", file_sha256(p)}});
      return arr;
    };
    j["inputs"] = files(inputs_);
    j["outputs"] = files(outputs_);
    j["started"] = started_;
    j["finished"] = utc_now();
    write_text(where, j.dump(1) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  std::string config_;
  std::string started_;
  std::vector<fs::path> inputs_, outputs_;
};

struct Options {
  std::optional<std::uint64_t> seed;
  std::string config_file;
  std::optional<std::string> mode;
  std::optional<std::string> negative;
  std::optional<double> gamma, beta;
  std::optional<std::size_t> clusters, shots;
  std::string out;
  bool force = false;
  bool skip_existing = false;
  // command specific
  std::string task_dir, pool_file, checkpoint, param, values;
  std::vector<std::string> splits;
};

LabConfig resolve_config(const Options& o, Manifest& m, bool seed_is_task) {
  LabConfig c;
  if (!o.config_file.empty()) {
    c = load_config(o.config_file);
    m.input(o.config_file);
  }
  if (o.seed) (seed_is_task ? c.task.seed : c.train.seed) = *o.seed;
  if (o.mode) c.train.mode = parse_mode(*o.mode);
  if (o.negative) c.train.negative = parse_negative_kind(*o.negative);
  if (o.gamma) c.train.gamma = *o.gamma;
  if (o.beta) c.train.beta = *o.beta;
  if (o.clusters) c.train.clusters = *o.clusters;
  if (o.shots) c.train.shots = *o.shots;
  c.train.validate();
  c.task.validate();
  m.config(c);
  return c;
}

void require_out(const Options& o) {
  if (o.out.empty()) fail(ErrorKind::MissingInput, "--out is required");
}

// Refuses to clobber an existing output unless --force.
void claim(const fs::path& p, const Options& o) {
  if (fs::exists(p) && !o.force) {
    fail(ErrorKind::AlreadyExists, p.string() + " exists (use --force to overwrite)");
  }
}

struct TaskFiles {
  Task task;
  Vocabulary vocab;
  std::optional<AttributePool> pool;
};

TaskFiles load_task_dir(const Options& o, Manifest& m, bool need_pool) {
  if (o.task_dir.empty()) fail(ErrorKind::MissingInput, "--task is required");
  const fs::path dir = o.task_dir;
  const fs::path task_path = dir / "task.json", vocab_path = dir / "vocab.json";
  TaskFiles f{Task::load(task_path), Vocabulary::load(vocab_path), std::nullopt};
  m.input(task_path);
  m.input(vocab_path);
  if (f.vocab.hash() != f.task.vocab_hash) {
    fail(ErrorKind::VocabularyHashMismatch, vocab_path.string() + " does not belong to the task");
  }
  const fs::path pool_path = o.pool_file.empty() ? dir / "pool.json" : fs::path(o.pool_file);
  if (fs::exists(pool_path)) {
    f.pool = load_pool(pool_path);
    m.input(pool_path);
  } else if (need_pool) {
    fail(ErrorKind::MissingInput, "attribute pool " + pool_path.string() + " not found");
  }
  return f;
}

// --- commands -------------------------------------------------------------------

void cmd_gen(const Options& o, Manifest& m) {
  require_out(o);
  const LabConfig c = resolve_config(o, m, /*seed_is_task=*/true);
  const fs::path dir = o.out;
  const fs::path task_path = dir / "task.json", vocab_path = dir / "vocab.json",
                 pool_path = dir / "pool.json";
  for (const auto& p : {task_path, vocab_path, pool_path}) claim(p, o);
  fs::create_directories(dir);
  const GeneratedTask g = generate_task(c.task);
  g.task.save(task_path);
  g.vocab.save(vocab_path);
  save_pool(g.pool, pool_path);
  for (const auto& p : {task_path, vocab_path, pool_path}) m.output(p);
  m.write(dir / "manifest.json");
  std::cout << "wrote " << task_path.string() << ", " << vocab_path.string() << ", "
            << pool_path.string() << "\n";
}

void cmd_validate(const Options& o, Manifest& m) {
  TaskFiles f = load_task_dir(o, m, /*need_pool=*/true);
  const AttributePool& pool = *f.pool;
  std::size_t attrs = 0;
  for (const auto& name : f.task.class_names) {
    const PoolClass& pc = pool.find(name);
    for (const auto& a : pc.attributes) attribute_token_ids(a, f.vocab);  // throws on gaps
    attrs += pc.attributes.size();
  }
  std::cout << "pool ok: " << f.task.class_names.size() << " classes, " << attrs
            << " attributes, all tokens in vocabulary\n";
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    m.write(fs::path(o.out) / "manifest.json");
  }
}

void cmd_sample(const Options& o, Manifest& m) {
  require_out(o);
  LabConfig c = resolve_config(o, m, false);
  c.train.mode = Mode::Argue;  // sampling is mode independent
  TaskFiles f = load_task_dir(o, m, true);
  const fs::path dir = o.out, out = dir / "sampled.json";
  claim(out, o);
  fs::create_directories(dir);
  SampledAttributes s;
  prepare_attributes(c.train, f.task, f.vocab, &*f.pool, &s);
  s.save(out);
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
  m.output(out);
  m.write(dir / "manifest.json");
  std::cout << "wrote " << out.string() << " (" << s.classes.size() << " classes)\n";
}

void cmd_train(const Options& o, Manifest& m) {
  require_out(o);
  const LabConfig c = resolve_config(o, m, false);
  TaskFiles f = load_task_dir(o, m, c.train.uses_attributes());
  const fs::path dir = o.out;
  const fs::path ckpt_path = dir / "checkpoint.json", hist_path = dir / "history.csv",
                 sampled_path = dir / "sampled.json";
  claim(ckpt_path, o);
  claim(hist_path, o);
  fs::create_directories(dir);

  SampledAttributes sampled;
  const auto attrs = prepare_attributes(c.train, f.task, f.vocab,
                                        f.pool ? &*f.pool : nullptr, &sampled);
  const TrainResult r = train(c.train, f.task, f.vocab, attrs);
  save_checkpoint(r.checkpoint, ckpt_path);
  write_text(hist_path, history_to_csv(r.history));
  m.output(ckpt_path);
  m.output(hist_path);
  if (c.train.uses_attributes()) {
    sampled.save(sampled_path);
    m.output(sampled_path);
  }
  m.write(dir / "manifest.json");
  std::cout << "trained " << to_string(c.train.mode) << " for " << r.checkpoint.steps
            << " steps, final loss " << r.history.back().total << "\n";
}

void cmd_eval(const Options& o, Manifest& m) {
  require_out(o);
  if (o.checkpoint.empty()) fail(ErrorKind::MissingInput, "--checkpoint is required");
  TaskFiles f = load_task_dir(o, m, false);
  const Checkpoint ckpt = load_checkpoint(o.checkpoint, &f.vocab);
  m.input(o.checkpoint);
  LabConfig c;
  c.train = ckpt.config;
  c.task = f.task.spec;
  m.config(c);

  const std::vector<std::string> splits = o.splits.empty() ? split_names() : o.splits;
  const fs::path dir = o.out, csv = dir / "report.csv", md = dir / "report.md";
  claim(csv, o);
  claim(md, o);
  const EvalReport rep = evaluate_splits(ckpt, f.task, f.vocab, splits);
  fs::create_directories(dir);
  write_text(csv, report_to_csv(rep));
  write_text(md, report_to_markdown(rep, to_string(ckpt.config.mode)));
  m.output(csv);
  m.output(md);
  m.write(dir / "manifest.json");
  std::cout << report_to_markdown(rep, to_string(ckpt.config.mode));
}

// "a,b,c" or "start:stop:step" (inclusive stop).
std::vector<std::string> expand_values(const std::string& spec) {
  std::vector<std::string> out;
  if (spec.find(':') != std::string::npos) {
    double v[3];
    std::stringstream ss(spec);
    std::string part;
    for (int i = 0; i < 3; ++i) {
      if (!std::getline(ss, part, ':')) fail(ErrorKind::InvalidConfig, "range needs start:stop:step");
      try {
        v[i] = std::stod(part);
      } catch (const std::exception&) {
        fail(ErrorKind::InvalidConfig, "bad range '" + spec + "'");
      }
    }
    if (!(v[2] > 0.0) || v[1] < v[0]) fail(ErrorKind::InvalidConfig, "bad range '" + spec + "'");
    const auto n = static_cast<std::size_t>(std::floor((v[1] - v[0]) / v[2] + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) {
      std::ostringstream s;
      s << v[0] + static_cast<double>(i) * v[2];
      out.push_back(s.str());
    }
  } else {
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ','))
      if (!part.empty()) out.push_back(part);
  }
  if (out.empty()) fail(ErrorKind::InvalidConfig, "no sweep values");
  return out;
}

std::map<std::string, std::string> read_sweep_rows(const fs::path& p) {
  std::map<std::string, std::string> rows;
  std::stringstream ss(read_text(p));
  std::string line;
  std::getline(ss, line);
  if (line != "param,base,new,h,ood_mean") {
    fail(ErrorKind::SchemaViolation, p.string() + " is not a sweep table");
  }
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    rows[line.substr(0, line.find(','))] = line + "\n";
  }
  return rows;
}

std::size_t sweep_threads() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ARGUE_LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      fail(ErrorKind::InvalidConfig, "ARGUE_LAB_THREADS must be a positive integer");
    }
    n = std::min(n, static_cast<std::size_t>(v));
  }
  return n;
}

void cmd_sweep(const Options& o, Manifest& m) {
  require_out(o);
  const LabConfig c = resolve_config(o, m, false);
  TaskFiles f = load_task_dir(o, m, c.train.uses_attributes());
  const std::vector<std::string> values = expand_values(o.values);
  const fs::path dir = o.out, csv = dir / "sweep.csv";

  std::map<std::string, std::string> done;
  if (fs::exists(csv)) {
    if (o.skip_existing) {
      done = read_sweep_rows(csv);
    } else if (!o.force) {
      fail(ErrorKind::AlreadyExists, csv.string() + " exists (use --skip-existing or --force)");
    }
  }
  std::vector<std::string> todo;
  for (const auto& v : values)
    if (!done.count(v)) todo.push_back(v);
  fs::create_directories(dir);

  // Rewritten after every finished run so an interrupted sweep can resume.
  auto flush = [&] {
    std::string text = "param,base,new,h,ood_mean\n";
    for (const auto& v : values)
      if (auto it = done.find(v); it != done.end()) text += it->second;
    write_text(csv, text);
  };
  sweep(c.train, o.param, todo, f.task, f.vocab, f.pool ? &*f.pool : nullptr, sweep_threads(),
        [&](const SweepRow& row) {
          done[row.value] = format_sweep_row(row);
          flush();
          std::cout << o.param << "=" << row.value << " done\n";
        });
  flush();
  m.output(csv);
  m.write(dir / "manifest.json");
  std::cout << "wrote " << csv.string() << " (" << values.size() << " rows, "
            << values.size() - todo.size() << " reused)\n";
}

std::string one_line(std::string s) {
  for (char& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ArGue attribute-guided prompt tuning lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ARGUE_VERSION);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Seed (task seed for gen, training seed otherwise)");
    sub->add_option("--config", o.config_file, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory");
    sub->add_flag("--force", o.force, "Overwrite existing outputs");
  };
  auto training = [&](CLI::App* sub) {
    sub->add_option("--task", o.task_dir, "Task directory (task.json, vocab.json, pool.json)");
    sub->add_option("--pool", o.pool_file, "Attribute pool (default: <task>/pool.json)");
    sub->add_option("--mode", o.mode, "baseline | argue | argue_n");
    sub->add_option("--negative", o.negative, "general | class_specific");
    sub->add_option("--gamma", o.gamma, "Negative-prompt weight");
    sub->add_option("--beta", o.beta, "Regularization weight");
    sub->add_option("--clusters", o.clusters, "Attribute clusters N");
    sub->add_option("--shots", o.shots, "Training shots per class");
  };

  auto* gen = app.add_subcommand("gen", "Generate a synthetic task");
  common(gen);
  auto* validate = app.add_subcommand("validate", "Check a pool against a task vocabulary");
  common(validate);
  validate->add_option("--task", o.task_dir)->required();
  validate->add_option("--pool", o.pool_file, "Pool file (default: <task>/pool.json)");
  auto* sample = app.add_subcommand("sample", "Sample N attributes per class");
  common(sample);
  training(sample);
  auto* trn = app.add_subcommand("train", "Tune the soft prompt bank");
  common(trn);
  training(trn);
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  common(eval);
  eval->add_option("--task", o.task_dir)->required();
  eval->add_option("--checkpoint", o.checkpoint)->required();
  eval->add_option("--splits", o.splits, "Splits to evaluate (default: all)")->delimiter(',');
  auto* swp = app.add_subcommand("sweep", "Train and evaluate over a parameter grid");
  common(swp);
  training(swp);
  swp->add_option("--param", o.param, "gamma | beta | clusters | shots")->required();
  swp->add_option("--values", o.values, "a,b,c or start:stop:step")->required();
  swp->add_flag("--skip-existing", o.skip_existing, "Keep rows already in sweep.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: Usage: " << one_line(e.what()) << "\n";
    return 64;
  }

  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    if (gen->parsed()) {
      Manifest m("gen", args);
      cmd_gen(o, m);
    } else if (validate->parsed()) {
      Manifest m("validate", args);
      cmd_validate(o, m);
    } else if (sample->parsed()) {
      Manifest m("sample", args);
      cmd_sample(o, m);
    } else if (trn->parsed()) {
      Manifest m("train", args);
      cmd_train(o, m);
    } else if (eval->parsed()) {
      Manifest m("eval", args);
      cmd_eval(o, m);
    } else if (swp->parsed()) {
      Manifest m("sweep", args);
      cmd_sweep(o, m);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << one_line(e.what()) << "\n";
    return 3;
  }
  return 0;
}
