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

#include "argue/synthbench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "argue/error.hpp"
#include "argue/io.hpp"
#include "argue/random.hpp"
#include "json_util.hpp"

namespace argue {

using detail::json;

void TaskSpec::validate() const {
  auto bad = [](const std::string& why) { fail(ErrorKind::InvalidSpec, why); };
  if (classes < 2) bad("need at least 2 classes");
  if (!(rho >= 0.0 && rho <= 1.0)) bad("rho must lie in [0, 1]");
  if (core_dim + spurious_dim > feature_dim) bad("core_dim + spurious_dim exceeds feature_dim");
  if (core_dim == 0 || spurious_dim == 0) bad("core and spurious blocks must be non-empty");
  if (feature_dim >= embed_dim) bad("embed_dim must exceed feature_dim (text-only directions)");
  if (aspects == 0 || core_dim % aspects != 0) bad("aspects must divide core_dim");
  if (attributes <= nonvisual + wrong_signature) bad("no room for true attributes");
  if (sharing == 0 || sharing > classes) bad("sharing must lie in [1, classes]");
  if (!(base_fraction > 0.0 && base_fraction < 1.0)) bad("base_fraction must lie in (0, 1)");
  if (shots == 0 || test_per_class == 0) bad("shots and test_per_class must be positive");
  if (!(noise_std >= 0.0) || !(perturbation >= 0.0) || !(noise_boost >= 0.0)) {
    bad("noise parameters must be non-negative");
  }
  if (!(distractor_mix >= 0.0 && distractor_mix <= 1.0)) bad("distractor_mix must lie in [0, 1]");
  if (d_tok == 0 || max_length < 8) bad("token width must be positive and max_length >= 8");
  const std::size_t base = static_cast<std::size_t>(std::round(base_fraction * classes));
  if (base == 0 || base == classes) bad("base/new split leaves one side empty");
}

OodKind parse_ood_kind(std::string_view name) {
  if (name == "shuffled_signature") return OodKind::ShuffledSignature;
  if (name == "zeroed_signature") return OodKind::ZeroedSignature;
  if (name == "noise_boost") return OodKind::NoiseBoost;
  fail(ErrorKind::UnknownKind, std::string(name));
}

std::string_view to_string(OodKind kind) {
  switch (kind) {
    case OodKind::ShuffledSignature: return "shuffled_signature";
    case OodKind::ZeroedSignature: return "zeroed_signature";
    case OodKind::NoiseBoost: return "noise_boost";
  }
  return "?";
}

DualEncoder Task::encoders() const {
  return DualEncoder{TextEncoder(text_encoder), ImageEncoder(image_encoder)};
}

Matrix Task::class_train_images(std::size_t c, std::size_t shots) const {
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < train.labels.size(); ++i) {
    if (train.labels[i] != c) continue;
    if (shots != 0 && rows.size() == shots) break;
    rows.push_back(train.features.row_vector(i));
  }
  if (rows.empty()) fail(ErrorKind::NoImages, "no training shots for class " + std::to_string(c));
  if (shots != 0 && rows.size() < shots) {
    fail(ErrorKind::InvalidConfig, "task has only " + std::to_string(rows.size()) +
                                       " shots per class, asked for " + std::to_string(shots));
  }
  return Matrix::from_rows(rows);
}

namespace {

Vector unit(Vector v) { return l2_normalize(v); }

Vector block_gaussian(std::size_t dim, std::size_t begin, std::size_t count, Rng& rng) {
  Vector v(dim);
  const Vector g = gaussian_vector(count, rng);
  for (std::size_t i = 0; i < count; ++i) v[begin + i] = g[i];
  return v;
}

Vector mix(double a, const Vector& x, double b, const Vector& y) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
  return out;
}

}  // namespace

GeneratedTask generate_task(const TaskSpec& spec) {
  spec.validate();
  const std::size_t C = spec.classes, K = spec.core_dim, S = spec.spurious_dim,
                    F = spec.feature_dim, D = spec.embed_dim;

  Task task;
  task.spec = spec;
  task.text_encoder = TextEncoderConfig{derive_seed(spec.seed, 1), spec.d_tok, D, spec.max_length};
  task.image_encoder = ImageEncoderConfig{derive_seed(spec.seed, 2), F, D, {K, S}};
  if (F > K + S) task.image_encoder.blocks.push_back(F - K - S);
  const DualEncoder enc = task.encoders();
  Rng rng(derive_seed(spec.seed, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto uniform_index = [&](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };

  // Attribute directions: each aspect owns a slice of the core block; every
  // direction is shared by about `sharing` classes.
  const std::size_t aspect_dim = K / spec.aspects;
  const std::size_t n_true = spec.attributes - spec.nonvisual - spec.wrong_signature;
  std::vector<Vector> directions;
  std::vector<std::vector<std::size_t>> class_dirs(C);
  for (std::size_t a = 0; a < spec.aspects; ++a) {
    const std::size_t per_class = n_true / spec.aspects + (a < n_true % spec.aspects ? 1 : 0);
    if (per_class == 0) continue;
    const std::size_t n_dirs = (C * per_class + spec.sharing - 1) / spec.sharing;
    const std::size_t first = directions.size();
    for (std::size_t d = 0; d < n_dirs; ++d) {
      directions.push_back(unit(block_gaussian(F, a * aspect_dim, aspect_dim, rng)));
    }
    std::vector<std::size_t> slots;
    for (std::size_t r = 0; r < spec.sharing; ++r) {
      std::vector<std::size_t> perm(n_dirs);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      slots.insert(slots.end(), perm.begin(), perm.end());
    }
    std::size_t cursor = 0;
    for (std::size_t c = 0; c < C; ++c) {
      std::vector<std::size_t> chosen;
      while (chosen.size() < per_class) {
        const std::size_t d = slots[cursor++ % slots.size()];
        if (std::find(chosen.begin(), chosen.end(), d) == chosen.end()) chosen.push_back(d);
      }
      for (std::size_t d : chosen) class_dirs[c].push_back(first + d);
    }
  }

  task.truth.core = Matrix(C, F);
  task.truth.signatures = Matrix(C, F);
  for (std::size_t c = 0; c < C; ++c) {
    Vector core(F);
    for (std::size_t d : class_dirs[c])
      for (std::size_t i = 0; i < F; ++i) core[i] += directions[d][i];
    core = unit(core);
    const Vector sig = unit(block_gaussian(F, K, S, rng));
    std::copy(core.begin(), core.end(), task.truth.core.row_span(c).begin());
    std::copy(sig.begin(), sig.end(), task.truth.signatures.row_span(c).begin());
  }
  auto core_of = [&](std::size_t c) { return task.truth.core.row_vector(c); };
  auto sig_of = [&](std::size_t c) { return task.truth.signatures.row_vector(c); };
  // Shared-space direction of a feature-space vector.
  auto shared = [&](const Vector& f) { return unit(enc.image.map_direction(f)); };

  // Vocabulary planting: a token whose first-order effect on the text output
  // points along `target`, plus a small seeded perturbation.
  Vocabulary vocab(spec.seed, spec.d_tok);
  auto plant = [&](const std::string& text, const Vector& target) {
    Vector x = unit(enc.text.inverse_direction(target));
    for (double& v : x) v = spec.token_norm * v + spec.perturbation * normal(rng);
    vocab.add(text, std::move(x));
  };
  for (const char* w : {"a", "photo", "of"}) {
    Vector x = unit(gaussian_vector(spec.d_tok, rng));
    for (double& v : x) v *= spec.template_norm;
    vocab.add(w, std::move(x));
  }
  for (std::size_t c = 0; c < C; ++c) {
    task.class_names.push_back("class" + std::to_string(c));
    plant(task.class_names.back(),
          mix(spec.name_core, shared(core_of(c)), spec.name_signature, shared(sig_of(c))));
  }
  auto attr_name = [](std::size_t i) {
    std::string n = std::to_string(i);
    return "attr" + std::string(n.size() < 3 ? 3 - n.size() : 0, '0') + n;
  };
  for (std::size_t d = 0; d < directions.size(); ++d) {
    plant(attr_name(d), shared(directions[d]));
    task.truth.attribute_kind[attr_name(d)] = "true";
  }
  Vector mean_sig(F);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t i = 0; i < F; ++i) mean_sig[i] += task.truth.signatures(c, i) / C;
  task.general_negative = "background";
  plant(task.general_negative, shared(mean_sig));
  for (std::size_t c = 0; c < C; ++c) {
    task.class_negatives.push_back("background_" + task.class_names[c]);
    plant(task.class_negatives.back(), shared(sig_of(c)));
  }

  // Distractors carry a small visual part and a large remainder. Non-visual
  // ones borrow the visual part from one of the class's own attributes (they
  // are said about the class) and put the rest on text-only coordinates the
  // image encoder never reaches. Wrong-signature ones are a random visual
  // aspect plus another class's background.
  const double vis = spec.distractor_mix, rest = std::sqrt(1.0 - vis * vis);
  auto random_aspect_dir = [&] {
    const std::size_t a = uniform_index(spec.aspects);
    return shared(block_gaussian(F, a * aspect_dim, aspect_dim, rng));
  };
  auto anchor_dir = [&](std::size_t c) {
    return shared(directions[class_dirs[c][uniform_index(class_dirs[c].size())]]);
  };
  std::size_t next_attr = directions.size();
  AttributePool pool;
  pool.dataset = "synthbench";
  for (std::size_t c = 0; c < C; ++c) {
    PoolClass pc;
    pc.name = task.class_names[c];
    pc.type = "synthetic";
    for (std::size_t d : class_dirs[c]) pc.attributes.push_back({attr_name(d), true});
    for (std::size_t k = 0; k < spec.nonvisual; ++k) {
      const Vector v = anchor_dir(c);
      const Vector free = unit(block_gaussian(D, F, D - F, rng));
      const std::string name = attr_name(next_attr++);
      plant(name, mix(vis, v, rest, free));
      task.truth.attribute_kind[name] = "nonvisual";
      pc.attributes.push_back({name, true});
    }
    for (std::size_t k = 0; k < spec.wrong_signature; ++k) {
      const std::size_t other = (c + 1 + uniform_index(C - 1)) % C;
      const Vector v = random_aspect_dir();
      const std::string name = attr_name(next_attr++);
      plant(name, mix(vis, v, rest, shared(sig_of(other))));
      task.truth.attribute_kind[name] = "wrong_signature";
      pc.attributes.push_back({name, true});
    }
    std::shuffle(pc.attributes.begin(), pc.attributes.end(), rng);
    pool.classes.push_back(std::move(pc));
  }

  // Images.
  auto sample = [&](std::size_t c, bool correlated, std::size_t* signature) {
    std::size_t s = c;
    if (!correlated || std::uniform_real_distribution<double>(0.0, 1.0)(rng) >= spec.rho) {
      s = uniform_index(C);
    }
    if (signature) *signature = s;
    Vector x(F);
    for (std::size_t i = 0; i < F; ++i) {
      x[i] = task.truth.core(c, i) + task.truth.signatures(s, i) + spec.noise_std * normal(rng);
    }
    return x;
  };
  auto fill = [&](LabeledSet& set, const std::vector<std::size_t>& classes, std::size_t per_class,
                  std::vector<std::size_t>* signatures) {
    std::vector<Vector> rows;
    for (std::size_t c : classes) {
      for (std::size_t i = 0; i < per_class; ++i) {
        std::size_t s = 0;
        rows.push_back(sample(c, true, &s));
        set.labels.push_back(c);
        if (signatures) signatures->push_back(s);
      }
    }
    set.features = Matrix::from_rows(rows);
  };
  const std::size_t n_base = static_cast<std::size_t>(std::round(spec.base_fraction * C));
  std::vector<std::size_t> all(C);
  std::iota(all.begin(), all.end(), 0);
  task.base_classes.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_base));
  task.new_classes.assign(all.begin() + static_cast<std::ptrdiff_t>(n_base), all.end());
  fill(task.train, all, spec.shots, nullptr);
  fill(task.base_test, task.base_classes, spec.test_per_class, nullptr);
  fill(task.new_test, task.new_classes, spec.test_per_class, nullptr);
  fill(task.id_test, task.base_classes, spec.test_per_class, &task.truth.id_test_signature);

  task.vocab_hash = vocab.hash();
  return GeneratedTask{std::move(task), std::move(vocab), std::move(pool)};
}

LabeledSet make_ood_variant(const Task& task, OodKind kind, std::uint64_t seed) {
  const std::size_t n = task.id_test.labels.size();
  const std::size_t F = task.spec.feature_dim, C = task.spec.classes;
  if (task.truth.id_test_signature.size() != n) {
    fail(ErrorKind::InvalidSpec, "task lacks id_test signature metadata");
  }
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, task.spec.noise_boost * task.spec.noise_std);
  std::uniform_int_distribution<std::size_t> pick(0, C - 1);
  LabeledSet out = task.id_test;
  for (std::size_t r = 0; r < n; ++r) {
    auto row = out.features.row_span(r);
    const std::size_t s = task.truth.id_test_signature[r];
    switch (kind) {
      case OodKind::ShuffledSignature: {
        const std::size_t u = pick(rng);
        for (std::size_t i = 0; i < F; ++i)
          row[i] += task.truth.signatures(u, i) - task.truth.signatures(s, i);
        break;
      }
      case OodKind::ZeroedSignature:
        for (std::size_t i = 0; i < F; ++i) row[i] -= task.truth.signatures(s, i);
        break;
      case OodKind::NoiseBoost:
        for (std::size_t i = 0; i < F; ++i) row[i] += normal(rng);
        break;
    }
  }
  return out;
}

// --- serialization -----------------------------------------------------------

namespace {

json spec_to_json(const TaskSpec& s) {
  return {{"classes", s.classes},
          {"base_fraction", s.base_fraction},
          {"shots", s.shots},
          {"rho", s.rho},
          {"core_dim", s.core_dim},
          {"spurious_dim", s.spurious_dim},
          {"feature_dim", s.feature_dim},
          {"noise_std", s.noise_std},
          {"attributes", s.attributes},
          {"sharing", s.sharing},
          {"aspects", s.aspects},
          {"nonvisual", s.nonvisual},
          {"wrong_signature", s.wrong_signature},
          {"test_per_class", s.test_per_class},
          {"d_tok", s.d_tok},
          {"embed_dim", s.embed_dim},
          {"max_length", s.max_length},
          {"name_core", s.name_core},
          {"name_signature", s.name_signature},
          {"distractor_mix", s.distractor_mix},
          {"perturbation", s.perturbation},
          {"template_norm", s.template_norm},
          {"token_norm", s.token_norm},
          {"noise_boost", s.noise_boost},
          {"seed", s.seed}};
}

TaskSpec spec_from_json(const json& j) {
  TaskSpec s;
  j.at("classes").get_to(s.classes);
  j.at("base_fraction").get_to(s.base_fraction);
  j.at("shots").get_to(s.shots);
  j.at("rho").get_to(s.rho);
  j.at("core_dim").get_to(s.core_dim);
  j.at("spurious_dim").get_to(s.spurious_dim);
  j.at("feature_dim").get_to(s.feature_dim);
  j.at("noise_std").get_to(s.noise_std);
  j.at("attributes").get_to(s.attributes);
  j.at("sharing").get_to(s.sharing);
  j.at("aspects").get_to(s.aspects);
  j.at("nonvisual").get_to(s.nonvisual);
  j.at("wrong_signature").get_to(s.wrong_signature);
  j.at("test_per_class").get_to(s.test_per_class);
  j.at("d_tok").get_to(s.d_tok);
  j.at("embed_dim").get_to(s.embed_dim);
  j.at("max_length").get_to(s.max_length);
  j.at("name_core").get_to(s.name_core);
  j.at("name_signature").get_to(s.name_signature);
  j.at("distractor_mix").get_to(s.distractor_mix);
  j.at("perturbation").get_to(s.perturbation);
  j.at("template_norm").get_to(s.template_norm);
  j.at("token_norm").get_to(s.token_norm);
  j.at("noise_boost").get_to(s.noise_boost);
  j.at("seed").get_to(s.seed);
  return s;
}

json set_to_json(const LabeledSet& s) {
  return {{"labels", s.labels}, {"features", detail::to_json(s.features)}};
}

LabeledSet set_from_json(const json& j, std::size_t F) {
  LabeledSet s;
  s.labels = j.at("labels").get<std::vector<std::size_t>>();
  s.features = detail::matrix_from_json(j.at("features"), F);
  if (s.features.rows() != s.labels.size()) {
    fail(ErrorKind::SchemaViolation, "split features and labels differ in length");
  }
  return s;
}

}  // namespace

std::string Task::to_json() const {
  json text = {{"seed", text_encoder.seed},
               {"d_tok", text_encoder.d_tok},
               {"dim", text_encoder.dim},
               {"max_length", text_encoder.max_length},
               {"input_gain", text_encoder.input_gain},
               {"output_gain", text_encoder.output_gain},
               {"position_amplitude", text_encoder.position_amplitude},
               {"bias_std", text_encoder.bias_std}};
  json image = {{"seed", image_encoder.seed},
                {"features", image_encoder.features},
                {"dim", image_encoder.dim},
                {"blocks", image_encoder.blocks},
                {"bias_std", image_encoder.bias_std}};
  json truth_j = {{"core", detail::to_json(truth.core)},
                  {"signatures", detail::to_json(truth.signatures)},
                  {"id_test_signature", truth.id_test_signature},
                  {"attribute_kind", truth.attribute_kind}};
  json j = {{"version", kFormatVersion},
            {"spec", spec_to_json(spec)},
            {"text_encoder", text},
            {"image_encoder", image},
            {"vocab_hash", vocab_hash},
            {"template", template_text},
            {"class_names", class_names},
            {"base_classes", base_classes},
            {"new_classes", new_classes},
            {"negatives", {{"general", general_negative}, {"class_specific", class_negatives}}},
            {"splits",
             {{"train", set_to_json(train)},
              {"base_test", set_to_json(base_test)},
              {"new_test", set_to_json(new_test)},
              {"id_test", set_to_json(id_test)}}},
            {"truth", truth_j}};
  return j.dump() + "\n";
}

Task Task::from_json(std::string_view text) {
  const json j = detail::parse_json(text, ErrorKind::SchemaViolation, "task");
  return detail::guarded(ErrorKind::SchemaViolation, "task", [&] {
    if (j.at("version").get<int>() != kFormatVersion) {
      fail(ErrorKind::VersionMismatch, "task version " + j.at("version").dump());
    }
    Task t;
    t.spec = spec_from_json(j.at("spec"));
    const auto& te = j.at("text_encoder");
    te.at("seed").get_to(t.text_encoder.seed);
    te.at("d_tok").get_to(t.text_encoder.d_tok);
    te.at("dim").get_to(t.text_encoder.dim);
    te.at("max_length").get_to(t.text_encoder.max_length);
    te.at("input_gain").get_to(t.text_encoder.input_gain);
    te.at("output_gain").get_to(t.text_encoder.output_gain);
    te.at("position_amplitude").get_to(t.text_encoder.position_amplitude);
    te.at("bias_std").get_to(t.text_encoder.bias_std);
    const auto& ie = j.at("image_encoder");
    ie.at("seed").get_to(t.image_encoder.seed);
    ie.at("features").get_to(t.image_encoder.features);
    ie.at("dim").get_to(t.image_encoder.dim);
    ie.at("blocks").get_to(t.image_encoder.blocks);
    ie.at("bias_std").get_to(t.image_encoder.bias_std);
    j.at("vocab_hash").get_to(t.vocab_hash);
    j.at("template").get_to(t.template_text);
    j.at("class_names").get_to(t.class_names);
    j.at("base_classes").get_to(t.base_classes);
    j.at("new_classes").get_to(t.new_classes);
    j.at("negatives").at("general").get_to(t.general_negative);
    j.at("negatives").at("class_specific").get_to(t.class_negatives);
    const std::size_t F = t.spec.feature_dim;
    const auto& sp = j.at("splits");
    t.train = set_from_json(sp.at("train"), F);
    t.base_test = set_from_json(sp.at("base_test"), F);
    t.new_test = set_from_json(sp.at("new_test"), F);
    t.id_test = set_from_json(sp.at("id_test"), F);
    const auto& tr = j.at("truth");
    t.truth.core = detail::matrix_from_json(tr.at("core"), F);
    t.truth.signatures = detail::matrix_from_json(tr.at("signatures"), F);
    tr.at("id_test_signature").get_to(t.truth.id_test_signature);
    tr.at("attribute_kind").get_to(t.truth.attribute_kind);
    for (const auto* set : {&t.train, &t.base_test, &t.new_test, &t.id_test})
      for (std::size_t y : set->labels)
        if (y >= t.class_names.size()) fail(ErrorKind::SchemaViolation, "label out of range");
    return t;
  });
}

void Task::save(const std::filesystem::path& path) const { write_text(path, to_json()); }

Task Task::load(const std::filesystem::path& path) { return from_json(read_text(path)); }

bool Task::operator==(const Task& o) const {
  auto same_text = [](const TextEncoderConfig& a, const TextEncoderConfig& b) {
    return a.seed == b.seed && a.d_tok == b.d_tok && a.dim == b.dim &&
           a.max_length == b.max_length && a.input_gain == b.input_gain &&
           a.output_gain == b.output_gain && a.position_amplitude == b.position_amplitude &&
           a.bias_std == b.bias_std;
  };
  auto same_image = [](const ImageEncoderConfig& a, const ImageEncoderConfig& b) {
    return a.seed == b.seed && a.features == b.features && a.dim == b.dim &&
           a.blocks == b.blocks && a.bias_std == b.bias_std;
  };
  return spec == o.spec && same_text(text_encoder, o.text_encoder) &&
         same_image(image_encoder, o.image_encoder) && vocab_hash == o.vocab_hash &&
         template_text == o.template_text && class_names == o.class_names &&
         base_classes == o.base_classes && new_classes == o.new_classes &&
         general_negative == o.general_negative && class_negatives == o.class_negatives &&
         train == o.train && base_test == o.base_test && new_test == o.new_test &&
         id_test == o.id_test && truth == o.truth;
}

}  // namespace argue
