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

#include "argue/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <thread>

#include "argue/error.hpp"
#include "argue/io.hpp"
#include "argue/loss.hpp"
#include "argue/random.hpp"
#include "json_util.hpp"

namespace argue {

using detail::json;

Mode parse_mode(std::string_view name) {
  if (name == "baseline") return Mode::Baseline;
  if (name == "argue") return Mode::Argue;
  if (name == "argue_n") return Mode::ArgueN;
  fail(ErrorKind::InvalidConfig, "unknown mode '" + std::string(name) + "'");
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Baseline: return "baseline";
    case Mode::Argue: return "argue";
    case Mode::ArgueN: return "argue_n";
  }
  return "?";
}

NegativeKind parse_negative_kind(std::string_view name) {
  if (name == "general") return NegativeKind::General;
  if (name == "class_specific") return NegativeKind::ClassSpecific;
  fail(ErrorKind::InvalidConfig, "unknown negative kind '" + std::string(name) + "'");
}

std::string_view to_string(NegativeKind kind) {
  return kind == NegativeKind::General ? "general" : "class_specific";
}

void TrainConfig::validate() const {
  auto bad = [](const std::string& why) { fail(ErrorKind::InvalidConfig, why); };
  if (epochs == 0 || batch_size == 0) bad("epochs and batch_size must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) bad("learning rate must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) bad("momentum must lie in [0, 1)");
  if (!(tau > 0.0)) fail(ErrorKind::NonPositiveTemperature, "tau must be positive");
  if (beta < 0.0 || gamma < 0.0) fail(ErrorKind::NegativeWeight, "beta and gamma must be >= 0");
  if (clusters == 0 || shots == 0) bad("clusters and shots must be positive");
}

// --- attributes ---------------------------------------------------------------

std::vector<ClassAttributes> resolve_attributes(const SampledAttributes& sampled,
                                                const AttributePool& pool) {
  std::vector<ClassAttributes> out;
  for (const auto& sc : sampled.classes) {
    const PoolClass& pc = pool.find(sc.name);
    std::vector<std::size_t> idx;
    for (const auto& s : sc.selected) {
      if (s.pool_index >= pc.attributes.size() || pc.attributes[s.pool_index].text != s.text) {
        fail(ErrorKind::UnknownAttribute, "'" + s.text + "' is not in the pool of " + sc.name);
      }
      idx.push_back(s.pool_index);
    }
    // Pool order, so that sampling every attribute reproduces the full pool run.
    std::sort(idx.begin(), idx.end());
    ClassAttributes ca{sc.name, {}};
    for (std::size_t i : idx) ca.attributes.push_back(pc.attributes[i]);
    out.push_back(std::move(ca));
  }
  return out;
}

std::vector<ClassAttributes> prepare_attributes(const TrainConfig& config, const Task& task,
                                                const Vocabulary& vocab,
                                                const AttributePool* pool,
                                                SampledAttributes* sampled) {
  if (!config.uses_attributes()) return {};
  if (!pool) fail(ErrorKind::MissingInput, "mode " + std::string(to_string(config.mode)) +
                                               " needs an attribute pool");
  std::vector<Matrix> images;
  for (std::size_t c = 0; c < task.class_names.size(); ++c) {
    images.push_back(task.class_train_images(c, config.shots));
  }
  const DualEncoder enc = task.encoders();
  SampledAttributes s = sample_attributes(*pool, task.class_names, images, enc, vocab,
                                          config.template_text, config.clusters, config.seed);
  auto out = resolve_attributes(s, *pool);
  if (sampled) *sampled = std::move(s);
  return out;
}

// --- checkpoint ---------------------------------------------------------------

namespace {

json config_to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"momentum", c.momentum},
          {"tau", c.tau},
          {"beta", c.beta},
          {"gamma", c.gamma},
          {"M", c.M},
          {"clusters", c.clusters},
          {"shots", c.shots},
          {"seed", c.seed},
          {"mode", std::string(to_string(c.mode))},
          {"negative", std::string(to_string(c.negative))},
          {"init_phrase", c.init_phrase},
          {"template", c.template_text}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  j.at("epochs").get_to(c.epochs);
  j.at("batch_size").get_to(c.batch_size);
  j.at("learning_rate").get_to(c.learning_rate);
  j.at("momentum").get_to(c.momentum);
  j.at("tau").get_to(c.tau);
  j.at("beta").get_to(c.beta);
  j.at("gamma").get_to(c.gamma);
  j.at("M").get_to(c.M);
  j.at("clusters").get_to(c.clusters);
  j.at("shots").get_to(c.shots);
  j.at("seed").get_to(c.seed);
  c.mode = parse_mode(j.at("mode").get<std::string>());
  c.negative = parse_negative_kind(j.at("negative").get<std::string>());
  j.at("init_phrase").get_to(c.init_phrase);
  j.at("template").get_to(c.template_text);
  return c;
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  json attrs = json::array();
  for (const auto& ca : ckpt.attributes) {
    json list = json::array();
    for (const auto& a : ca.attributes) list.push_back({{"text", a.text}, {"planted", a.planted}});
    attrs.push_back({{"class", ca.class_name}, {"attributes", list}});
  }
  return detail::dump({{"version", Checkpoint::kFormatVersion},
                       {"config", config_to_json(ckpt.config)},
                       {"bank", detail::to_json(ckpt.bank.values)},
                       {"bank_init", ckpt.bank.init},
                       {"vocab_hash", ckpt.vocab_hash},
                       {"encoder_seeds",
                        {{"text", ckpt.text_encoder_seed}, {"image", ckpt.image_encoder_seed}}},
                       {"steps", ckpt.steps},
                       {"attributes", attrs}});
}

Checkpoint checkpoint_from_json(std::string_view text, const Vocabulary* vocab) {
  const json j = detail::parse_json(text, ErrorKind::VersionMismatch, "checkpoint unreadable");
  if (!j.is_object() || !j.contains("version") || !j["version"].is_number_integer() ||
      j["version"].get<int>() != Checkpoint::kFormatVersion) {
    fail(ErrorKind::VersionMismatch, "checkpoint version is missing or unsupported");
  }
  Checkpoint c = detail::guarded(ErrorKind::SchemaViolation, "checkpoint", [&] {
    Checkpoint c;
    c.config = config_from_json(j.at("config"));
    c.bank.values = detail::matrix_from_json(j.at("bank"), 0);
    c.bank.init = j.at("bank_init").get<std::string>();
    c.vocab_hash = j.at("vocab_hash").get<std::string>();
    c.text_encoder_seed = j.at("encoder_seeds").at("text").get<std::uint64_t>();
    c.image_encoder_seed = j.at("encoder_seeds").at("image").get<std::uint64_t>();
    c.steps = j.at("steps").get<std::size_t>();
    for (const auto& a : j.at("attributes")) {
      ClassAttributes ca{a.at("class").get<std::string>(), {}};
      for (const auto& t : a.at("attributes")) {
        ca.attributes.push_back({t.at("text").get<std::string>(), t.at("planted").get<bool>()});
      }
      c.attributes.push_back(std::move(ca));
    }
    return c;
  });
  if (c.bank.values.rows() != c.config.M) {
    fail(ErrorKind::SchemaViolation, "bank has " + std::to_string(c.bank.values.rows()) +
                                         " rows, config says M = " + std::to_string(c.config.M));
  }
  if (vocab && vocab->hash() != c.vocab_hash) {
    fail(ErrorKind::VocabularyHashMismatch, "checkpoint was trained against another vocabulary");
  }
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  write_text(path, checkpoint_to_json(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const Vocabulary* vocab) {
  return checkpoint_from_json(read_text(path), vocab);
}

// --- history --------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_pct(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string history_to_csv(const std::vector<EpochLoss>& history) {
  std::string out = "epoch,l_ent,l_reg,l_neg,total\n";
  for (const auto& e : history) {
    out += std::to_string(e.epoch) + "," + fmt(e.l_ent) + "," + (e.l_reg ? fmt(*e.l_reg) : "") +
           "," + (e.l_neg ? fmt(*e.l_neg) : "") + "," + fmt(e.total) + "\n";
  }
  return out;
}

void sgd_step(SoftPromptBank& bank, const Matrix& gradient, double learning_rate) {
  if (gradient.rows() != bank.values.rows() || gradient.cols() != bank.values.cols()) {
    fail(ErrorKind::DimensionMismatch, "gradient shape differs from bank");
  }
  if (!all_finite(gradient.span())) fail(ErrorKind::NonFiniteGradient, "gradient has NaN/Inf");
  for (std::size_t i = 0; i < gradient.size(); ++i) bank.values[i] -= learning_rate * gradient[i];
}

// --- objective ------------------------------------------------------------------

namespace {

const ClassAttributes& attributes_of(const std::vector<ClassAttributes>& all,
                                     const std::string& name) {
  for (const auto& ca : all)
    if (ca.class_name == name) return ca;
  fail(ErrorKind::EmptyAttributeSet, "no attributes for class " + name);
}

// Attribute-guided (or plain soft) prompts for `classes`, grouped by class.
std::vector<PromptAssembly> class_prompts(const TrainConfig& config, const Task& task,
                                          Lexicon& lex, const SoftPromptBank& bank,
                                          const std::vector<ClassAttributes>& attributes,
                                          const std::vector<std::size_t>& classes,
                                          std::vector<std::size_t>& segments,
                                          std::size_t max_length) {
  std::vector<PromptAssembly> prompts;
  segments.clear();
  for (std::size_t c : classes) {
    const std::size_t cid = lex.add_class(task.class_names[c]);
    if (!config.uses_attributes()) {
      prompts.push_back(assemble_attribute_prompt(bank, lex, cid, std::nullopt, max_length));
      segments.push_back(1);
      continue;
    }
    const auto& ca = attributes_of(attributes, task.class_names[c]);
    if (ca.attributes.empty()) fail(ErrorKind::EmptyAttributeSet, ca.class_name);
    for (const auto& a : ca.attributes) {
      const std::size_t aid = lex.add_attribute(a.text, a.planted);
      prompts.push_back(assemble_attribute_prompt(bank, lex, cid, aid, max_length));
    }
    segments.push_back(ca.attributes.size());
  }
  return prompts;
}

}  // namespace

Objective::Objective(const TrainConfig& config, const Task& task, const Vocabulary& vocab,
                     const std::vector<ClassAttributes>& attributes)
    : config_(config), enc_(task.encoders()), lexicon_(vocab) {
  config.validate();
  if (task.base_classes.empty()) fail(ErrorKind::EmptyTask, "task has no base classes");
  const std::size_t L = enc_.text.max_length();
  bank0_ = init_soft_prompts(vocab, config.M, config.init_phrase, config.seed);

  auto prompts = class_prompts(config, task, lexicon_, bank0_, attributes, task.base_classes,
                               segments_, L);
  if (config.uses_attributes()) {
    std::vector<Vector> rows;
    for (const auto& p : prompts) {
      const auto t = assemble_textual_prompt(config.template_text, lexicon_, p.class_id,
                                             p.attribute_id, L);
      rows.push_back(encode_prompt(enc_.text, vocab, bank0_, t));
    }
    textual_ = Matrix::from_rows(rows);
  }
  prompts_.emplace(enc_.text, vocab, std::move(prompts), config.M);

  if (config.mode == Mode::ArgueN) {
    std::vector<PromptAssembly> neg;
    for (std::size_t c : task.base_classes) {
      const std::string& text = config.negative == NegativeKind::General
                                    ? task.general_negative
                                    : task.class_negatives.at(c);
      const std::size_t nid = lexicon_.add_negative(text);
      neg.push_back(assemble_negative_prompt(bank0_, lexicon_,
                                             lexicon_.class_id(task.class_names[c]), nid, L));
    }
    negatives_.emplace(enc_.text, vocab, std::move(neg), config.M);
  }

  std::vector<Vector> rows;
  for (std::size_t i = 0; i < task.base_classes.size(); ++i) {
    const Matrix shots = task.class_train_images(task.base_classes[i], config.shots);
    for (std::size_t r = 0; r < shots.rows(); ++r) {
      rows.push_back(enc_.image.encode(shots.row_vector(r)));
      labels_.push_back(i);
    }
  }
  images_ = Matrix::from_rows(rows);
}

Objective::Terms Objective::build(ad::Tape& tape, ad::Var bank,
                                  const std::vector<std::size_t>& rows) const {
  if (rows.empty()) fail(ErrorKind::EmptyTask, "empty batch");
  Matrix batch(rows.size(), images_.cols());
  std::vector<std::size_t> labels;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = images_.row_span(rows.at(i));
    std::copy(src.begin(), src.end(), batch.row_span(i).begin());
    labels.push_back(labels_[rows[i]]);
  }
  const ad::Var images = tape.constant(std::move(batch));
  const ad::Var prompts = prompts_->encode(bank);

  Terms t;
  t.l_ent = ad::classification_loss(
      ad::attribute_log_probs(images, prompts, segments_, config_.tau), labels);
  t.total = t.l_ent;
  if (config_.uses_attributes()) {
    t.has_reg = true;
    t.l_reg = ad::regularization_loss(prompts, tape.constant(textual_), config_.tau);
    t.total = ad::add(t.total, ad::scale(t.l_reg, config_.beta));
  }
  if (negatives_) {
    t.has_neg = true;
    t.l_neg = ad::negative_loss(images, negatives_->encode(bank), config_.tau);
    t.total = ad::add(t.total, ad::scale(t.l_neg, config_.effective_gamma()));
  }
  return t;
}

TrainResult train(const TrainConfig& config, const Task& task, const Vocabulary& vocab,
                  const std::vector<ClassAttributes>& attributes) {
  if (vocab.hash() != task.vocab_hash) {
    fail(ErrorKind::VocabularyHashMismatch, "vocabulary does not belong to this task");
  }
  const Objective objective(config, task, vocab, attributes);
  TrainResult result;
  Checkpoint& ckpt = result.checkpoint;
  ckpt.config = config;
  ckpt.bank = objective.initial_bank();
  ckpt.vocab_hash = task.vocab_hash;
  ckpt.text_encoder_seed = task.text_encoder.seed;
  ckpt.image_encoder_seed = task.image_encoder.seed;
  ckpt.attributes = attributes;

  Rng shuffle_rng(derive_seed(config.seed, 7));
  std::vector<std::size_t> order(objective.sample_count());
  std::iota(order.begin(), order.end(), 0);
  Matrix velocity(ckpt.bank.values.rows(), ckpt.bank.values.cols());

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochLoss e;
    e.epoch = epoch;
    double ent = 0.0, reg = 0.0, neg = 0.0, total = 0.0;
    std::size_t batches = 0;
    bool has_reg = false, has_neg = false;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                          order.begin() + static_cast<std::ptrdiff_t>(end));
      ad::Tape tape;
      const ad::Var bank = tape.parameter(ckpt.bank.values);
      const auto terms = objective.build(tape, bank, rows);
      const double value = terms.total.scalar();
      if (!std::isfinite(value)) {
        fail(ErrorKind::DivergedLoss, "total loss " + fmt(value) + " at epoch " +
                                          std::to_string(epoch));
      }
      tape.backward(terms.total);
      const Matrix& g = tape.grad(bank);
      if (!all_finite(g.span())) fail(ErrorKind::NonFiniteGradient, "epoch " + std::to_string(epoch));
      for (std::size_t i = 0; i < g.size(); ++i) velocity[i] = config.momentum * velocity[i] + g[i];
      sgd_step(ckpt.bank, velocity, config.learning_rate);
      ++ckpt.steps;

      ent += terms.l_ent.scalar();
      if ((has_reg = terms.has_reg)) reg += terms.l_reg.scalar();
      if ((has_neg = terms.has_neg)) neg += terms.l_neg.scalar();
      total += value;
      ++batches;
    }
    const double n = static_cast<double>(batches);
    e.l_ent = ent / n;
    if (has_reg) e.l_reg = reg / n;
    if (has_neg) e.l_neg = neg / n;
    e.total = total / n;
    result.history.push_back(e);
  }
  return result;
}

// --- evaluation -----------------------------------------------------------------

SplitResult evaluate(const Checkpoint& ckpt, const Task& task, const Vocabulary& vocab,
                     std::string_view split) {
  const LabeledSet* set = nullptr;
  LabeledSet variant;
  const std::vector<std::size_t>* classes = &task.base_classes;
  if (split == "base_test") {
    set = &task.base_test;
  } else if (split == "new_test") {
    set = &task.new_test;
    classes = &task.new_classes;
  } else if (split == "id_test") {
    set = &task.id_test;
  } else if (split.substr(0, 4) == "ood_") {
    OodKind kind;
    try {
      kind = parse_ood_kind(split.substr(4));
    } catch (const Error&) {
      fail(ErrorKind::UnknownSplit, std::string(split));
    }
    variant = make_ood_variant(task, kind, derive_seed(task.spec.seed, 100 + static_cast<int>(kind)));
    set = &variant;
  } else {
    fail(ErrorKind::UnknownSplit, std::string(split));
  }
  if (vocab.hash() != ckpt.vocab_hash) {
    fail(ErrorKind::VocabularyHashMismatch, "checkpoint was trained against another vocabulary");
  }

  const DualEncoder enc = task.encoders();
  Lexicon lex(vocab);
  std::vector<std::size_t> segments;
  const auto prompts = class_prompts(ckpt.config, task, lex, ckpt.bank, ckpt.attributes,
                                     *classes, segments, enc.text.max_length());
  const Matrix W = PromptSet(enc.text, vocab, prompts, ckpt.config.M).encode(ckpt.bank);

  SplitResult r;
  r.split = std::string(split);
  for (std::size_t i = 0; i < set->labels.size(); ++i) {
    const Vector f = enc.image.encode(set->features.row_vector(i));
    std::vector<double> logits(W.rows());
    for (std::size_t k = 0; k < W.rows(); ++k) logits[k] = dot(f.span(), W.row_span(k)) / ckpt.config.tau;
    // Eq. 3's class score up to the shared normalizer: log sum_j exp(logit).
    std::size_t best = 0, offset = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < segments.size(); ++c) {
      const auto first = logits.begin() + static_cast<std::ptrdiff_t>(offset);
      const auto last = first + static_cast<std::ptrdiff_t>(segments[c]);
      const double m = *std::max_element(first, last);
      double s = 0.0;
      for (auto it = first; it != last; ++it) s += std::exp(*it - m);
      const double score = m + std::log(s);
      if (score > best_score) best_score = score, best = c;
      offset += segments[c];
    }
    r.correct += (*classes)[best] == set->labels[i];
    ++r.total;
  }
  r.accuracy = r.total ? 100.0 * static_cast<double>(r.correct) / static_cast<double>(r.total) : 0.0;
  return r;
}

double harmonic_mean(double base, double novel) {
  if (base < 0.0 || novel < 0.0) fail(ErrorKind::NegativeInput, "accuracies must be >= 0");
  if (base + novel == 0.0) return 0.0;
  return 2.0 * base * novel / (base + novel);
}

double EvalReport::ood_mean() const {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& r : splits) {
    if (r.split.rfind("ood_", 0) == 0) s += r.accuracy, ++n;
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

EvalReport evaluate_splits(const Checkpoint& ckpt, const Task& task, const Vocabulary& vocab,
                           const std::vector<std::string>& splits) {
  EvalReport rep;
  bool have_base = false, have_new = false;
  for (const auto& s : splits) {
    rep.splits.push_back(evaluate(ckpt, task, vocab, s));
    if (s == "base_test") rep.base = rep.splits.back().accuracy, have_base = true;
    if (s == "new_test") rep.novel = rep.splits.back().accuracy, have_new = true;
  }
  if (have_base && have_new) rep.harmonic = harmonic_mean(rep.base, rep.novel);
  return rep;
}

std::string report_to_csv(const EvalReport& report) {
  std::string out = "split,accuracy,correct,total\n";
  for (const auto& s : report.splits) {
    out += s.split + "," + fmt_pct(s.accuracy) + "," + std::to_string(s.correct) + "," +
           std::to_string(s.total) + "\n";
  }
  return out;
}

std::string report_to_markdown(const EvalReport& report, std::string_view title) {
  std::string out = "| Method | Base | New | H |\n|---|---|---|---|\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "| %s | %.2f | %.2f | %.2f |\n", std::string(title).c_str(),
                report.base, report.novel, report.harmonic);
  out += buf;
  out += "\n| Split | Accuracy | Correct | Total |\n|---|---|---|---|\n";
  for (const auto& s : report.splits) {
    std::snprintf(buf, sizeof buf, "| %s | %.2f | %zu | %zu |\n", s.split.c_str(), s.accuracy,
                  s.correct, s.total);
    out += buf;
  }
  return out;
}

// --- sweeps ---------------------------------------------------------------------

TrainConfig with_parameter(TrainConfig config, std::string_view param, std::string_view value) {
  const std::string v(value);
  std::size_t used = 0;
  auto as_double = [&] {
    double d = 0.0;
    try {
      d = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size() || v.empty()) fail(ErrorKind::InvalidConfig, "bad value '" + v + "'");
    return d;
  };
  auto as_count = [&] {
    const double d = as_double();
    if (d < 1.0 || d != std::floor(d)) fail(ErrorKind::InvalidConfig, "bad count '" + v + "'");
    return static_cast<std::size_t>(d);
  };
  if (param == "gamma") {
    config.gamma = as_double();
  } else if (param == "beta") {
    config.beta = as_double();
  } else if (param == "clusters") {
    config.clusters = as_count();
  } else if (param == "shots") {
    config.shots = as_count();
  } else {
    fail(ErrorKind::UnknownParameter, std::string(param));
  }
  config.validate();
  return config;
}

std::string format_sweep_row(const SweepRow& r) {
  return r.value + "," + fmt_pct(r.base) + "," + fmt_pct(r.novel) + "," + fmt_pct(r.harmonic) +
         "," + fmt_pct(r.ood_mean) + "\n";
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "param,base,new,h,ood_mean\n";
  for (const auto& r : rows) out += format_sweep_row(r);
  return out;
}

std::vector<SweepRow> sweep(const TrainConfig& config, std::string_view param,
                            const std::vector<std::string>& values, const Task& task,
                            const Vocabulary& vocab, const AttributePool* pool,
                            std::size_t threads,
                            const std::function<void(const SweepRow&)>& on_row) {
  std::vector<TrainConfig> configs;
  for (const auto& v : values) configs.push_back(with_parameter(config, param, v));

  std::vector<SweepRow> rows(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < values.size();) {
      try {
        const auto attrs = prepare_attributes(configs[i], task, vocab, pool);
        const auto result = train(configs[i], task, vocab, attrs);
        const EvalReport rep = evaluate_splits(result.checkpoint, task, vocab);
        rows[i] = {values[i], rep.base, rep.novel, rep.harmonic, rep.ood_mean()};
        if (on_row) {
          std::lock_guard<std::mutex> lock(report_mutex);
          on_row(rows[i]);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(threads, values.size()));
  std::vector<std::thread> pool_threads;
  for (std::size_t t = 1; t < n_threads; ++t) pool_threads.emplace_back(worker);
  worker();
  for (auto& t : pool_threads) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

}  // namespace argue
