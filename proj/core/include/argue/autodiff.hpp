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

#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "argue/numerics.hpp"

namespace argue::ad {

class Tape;

/// Handle to a node on a Tape. Cheap to copy; only valid while its tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  std::size_t id() const noexcept { return id_; }
  Tape* tape() const noexcept { return tape_; }
  double scalar() const;

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode trace. Nodes are appended in evaluation order, so the node list
/// is already a topological order and backward is one reverse sweep. A tape is
/// built per step and discarded; it is not thread-safe.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  struct Node {
    std::string_view op;
    Matrix value;
    Matrix grad;
    std::vector<std::size_t> parents;
    bool requires_grad = false;
    bool is_parameter = false;
    Backward backward;
  };

  Var constant(Matrix value);
  Var parameter(Matrix value);

  // Seeds d(root)/d(root) = 1 and propagates to every parameter.
  void backward(Var root);

  const Matrix& value(Var v) const { return nodes_[v.id()].value; }
  const Matrix& grad(Var v) const { return nodes_[v.id()].grad; }
  const Node& node(std::size_t id) const { return nodes_[id]; }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t backward_visits() const noexcept { return backward_visits_; }

  // Used by operation implementations.
  Var push(std::string_view op, Matrix value, std::vector<std::size_t> parents,
           Backward backward);
  Matrix& grad_ref(std::size_t id) { return nodes_[id].grad; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  const Matrix& value_of(std::size_t id) const { return nodes_[id].value; }

 private:
  std::vector<Node> nodes_;
  std::size_t backward_visits_ = 0;
};

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var a, double factor);
// Element-wise product.
Var mul(Var a, Var b);
// X (n x m) + b (1 x m), b broadcast over rows.
Var add_row(Var x, Var b);
// X (n x m) - c (n x 1), c broadcast over columns.
Var sub_col(Var x, Var c);
Var matmul(Var a, Var b);
Var transpose(Var a);
Var tanh(Var a);
// Column means: (n x m) -> (1 x m).
Var mean_rows(Var x);
// Each row divided by its Euclidean norm.
Var normalize_rows(Var x);
Var concat_rows(const std::vector<Var>& parts);
Var slice_rows(Var x, std::size_t begin, std::size_t count);
Var log_softmax_rows(Var x);
// (n x m) -> (n x 1)
Var logsumexp_rows(Var x);
// Splits columns into consecutive groups and log-sum-exps each: (n x m) -> (n x G).
Var segment_logsumexp_rows(Var x, const std::vector<std::size_t>& segment_sizes);
// Picks x(i, index[i]) for each row: (n x m) -> (n x 1).
Var gather_rows(Var x, const std::vector<std::size_t>& index);
Var sum(Var x);
Var mean(Var x);

struct GradientReport {
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  Matrix analytic;
  Matrix numeric;
};

using LossBuilder = std::function<Var(Tape&, Var)>;

/// Compares the reverse-mode gradient of `loss` at `params` against central
/// differences coordinate by coordinate. Relative error uses
/// max(|analytic|, |numeric|, 1e-8) as its denominator.
GradientReport gradient_check(const LossBuilder& loss, const Matrix& params,
                              double epsilon = 1e-5);

}  // namespace argue::ad
