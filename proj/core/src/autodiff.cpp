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

#include "argue/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "argue/error.hpp"

namespace argue::ad {

const Matrix& Var::value() const { return tape_->value(*this); }

double Var::scalar() const {
  const Matrix& m = value();
  if (m.size() != 1) fail(ErrorKind::DimensionMismatch, "scalar() on non-scalar node");
  return m[0];
}

Var Tape::constant(Matrix value) { return push("constant", std::move(value), {}, nullptr); }

Var Tape::parameter(Matrix value) {
  Var v = push("parameter", std::move(value), {}, nullptr);
  nodes_[v.id()].requires_grad = true;
  nodes_[v.id()].is_parameter = true;
  return v;
}

Var Tape::push(std::string_view op, Matrix value, std::vector<std::size_t> parents,
               Backward backward) {
  Node n;
  n.op = op;
  n.requires_grad = std::any_of(parents.begin(), parents.end(),
                                [this](std::size_t p) { return nodes_[p].requires_grad; });
  n.value = std::move(value);
  n.parents = std::move(parents);
  n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

void Tape::backward(Var root) {
  if (value(root).size() != 1) {
    fail(ErrorKind::DimensionMismatch, "backward root must be a scalar");
  }
  for (auto& n : nodes_) n.grad = Matrix(n.value.rows(), n.value.cols(), 0.0);
  backward_visits_ = 0;
  nodes_[root.id()].grad[0] = 1.0;
  for (std::size_t i = root.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad) continue;
    ++backward_visits_;
    if (n.backward) n.backward(*this, i);
  }
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorKind::DimensionMismatch, std::string(op) + ": shape mismatch");
  }
}

Tape& tape_of(Var a, Var b) {
  if (a.tape() != b.tape()) fail(ErrorKind::DimensionMismatch, "operands on different tapes");
  return *a.tape();
}

void accumulate(Tape& t, std::size_t target, const Matrix& delta, double factor = 1.0) {
  if (!t.requires_grad(target)) return;
  Matrix& g = t.grad_ref(target);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += factor * delta[i];
}

}  // namespace

Var add(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Matrix& x = a.value();
  const Matrix& y = b.value();
  require_same_shape(x, y, "add");
  Matrix out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += y[i];
  const auto ia = a.id(), ib = b.id();
  return t.push("add", std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(Var(&tp, self));
    accumulate(tp, ia, g);
    accumulate(tp, ib, g);
  });
}

Var sub(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Matrix& x = a.value();
  const Matrix& y = b.value();
  require_same_shape(x, y, "sub");
  Matrix out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= y[i];
  const auto ia = a.id(), ib = b.id();
  return t.push("sub", std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(Var(&tp, self));
    accumulate(tp, ia, g);
    accumulate(tp, ib, g, -1.0);
  });
}

Var scale(Var a, double factor) {
  Tape& t = *a.tape();
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor;
  const auto ia = a.id();
  return t.push("scale", std::move(out), {ia}, [ia, factor](Tape& tp, std::size_t self) {
    accumulate(tp, ia, tp.grad(Var(&tp, self)), factor);
  });
}

Var mul(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Matrix& x = a.value();
  const Matrix& y = b.value();
  require_same_shape(x, y, "mul");
  Matrix out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= y[i];
  const auto ia = a.id(), ib = b.id();
  return t.push("mul", std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(Var(&tp, self));
    const Matrix& x = tp.value_of(ia);
    const Matrix& y = tp.value_of(ib);
    if (tp.requires_grad(ia)) {
      Matrix& ga = tp.grad_ref(ia);
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * y[i];
    }
    if (tp.requires_grad(ib)) {
      Matrix& gb = tp.grad_ref(ib);
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[i] * x[i];
    }
  });
}

Var add_row(Var x, Var b) {
  Tape& t = tape_of(x, b);
  const Matrix& xv = x.value();
  const Matrix& bv = b.value();
  if (bv.rows() != 1 || bv.cols() != xv.cols()) {
    fail(ErrorKind::DimensionMismatch, "add_row: bias must be 1 x cols");
  }
  Matrix out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += bv[c];
  const auto ix = x.id(), ib = b.id();
  return t.push("add_row", std::move(out), {ix, ib}, [ix, ib](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(Var(&tp, self));
    accumulate(tp, ix, g);
    if (tp.requires_grad(ib)) {
      Matrix& gb = tp.grad_ref(ib);
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) gb[c] += g(r, c);
    }
  });
}

Var sub_col(Var x, Var c) {
  Tape& t = tape_of(x, c);
  const Matrix& xv = x.value();
  const Matrix& cv = c.value();
  if (cv.cols() != 1 || cv.rows() != xv.rows()) {
    fail(ErrorKind::DimensionMismatch, "sub_col: operand must be rows x 1");
  }
  Matrix out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t k = 0; k < out.cols(); ++k) out(r, k) -= cv[r];
  const auto ix = x.id(), ic = c.id();
  return t.push("sub_col", std::move(out), {ix, ic}, [ix, ic](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(Var(&tp, self));
    accumulate(tp, ix, g);
    if (tp.requires_grad(ic)) {
      Matrix& gc = tp.grad_ref(ic);
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t k = 0; k < g.cols(); ++k) gc[r] -= g(r, k);
    }
  });
}

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Matrix& x = a.value();
  const Matrix& y = b.value();
  if (x.cols() != y.rows()) fail(ErrorKind::DimensionMismatch, "matmul: inner dimensions");
  Matrix out(x.rows(), y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = 0; k < x.cols(); ++k) {
      const double xik = x(i, k);
      if (xik == 0.0) continue;
      for (std::size_t j = 0; j < y.cols(); ++j) out(i, j) += xik * y(k, j);
    }
  const auto ia = a.id(), ib = b.id();
  return t.push("matmul", std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad(Var(&tp, self));
    const Matrix& x = tp.value_of(ia);
    const Matrix& y = tp.value_of(ib);
    if (tp.requires_grad(ia)) {
      Matrix& ga = tp.grad_ref(ia);  // g * y^T
      for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < x.cols(); ++k) {
          double s = 0.0;
          for (std::size_t j = 0; j < y.cols(); ++j) s += g(i, j) * y(k, j);
          ga(i, k) += s;
        }
    }
    if (tp.requires_grad(ib)) {
      Matrix& gb = tp.grad_ref(ib);  // x^T * g
      for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < x.cols(); ++k) {
          const double xik = x(i, k);
          if (xik == 0.0) continue;
          for (std::size_t j = 0; j < y.cols(); ++j) gb(k, j) += xik * g(i, j);
        }
    }
  });
}

Var transpose(Var a) {
  Tape& t = *a.tape();
  const Matrix& x = a.value();
  Matrix out(x.cols(), x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(c, r) = x(r, c);
  const auto ia = a.id();
  return t.push("transpose", std::move(out), {ia}, [ia](Tape& tp, std::size_t self) {
    if (!tp.requires_grad(ia)) return;
    const Matrix& g = tp.grad(Var(&tp, self));
    Matrix& ga = tp.grad_ref(ia);
    for (std::size_t r = 0; r < ga.rows(); ++r)
      for (std::size_t c = 0; c < ga.cols(); ++c) ga(r, c) += g(c, r);
  });
}

Var tanh(Var a) {
  Tape& t = *a.tape();
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  const auto ia = a.id();
  return t.push("tanh", std::move(out), {ia}, [ia](Tape& tp, std::size_t self) {
    if (!tp.requires_grad(ia)) return;
    const Matrix& g = tp.grad(Var(&tp, self));
    const Matrix& y = tp.value_of(self);
    Matrix& ga = tp.grad_ref(ia);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Var mean_rows(Var x) {
  Tape& t = *x.tape();
  const Matrix& xv = x.value();
  if (xv.rows() == 0) fail(ErrorKind::EmptySequence, "mean_rows of empty matrix");
  Matrix out(1, xv.cols());
  for (std::size_t r = 0; r < xv.rows(); ++r)
    for (std::size_t c = 0; c < xv.cols(); ++c) out[c] += xv(r, c);
  const double inv = 1.0 / static_cast<double>(xv.rows());
  for (std::size_t c = 0; c < out.cols(); ++c) out[c] *= inv;
  const auto ix = x.id();
  return t.push("mean_rows", std::move(out), {ix}, [ix, inv](Tape& tp, std::size_t self) {
    if (!tp.requires_grad(ix)) return;
    const Matrix& g = tp.grad(Var(&tp, self));
    Matrix& gx = tp.grad_ref(ix);
    for (std::size_t r = 0; r < gx.rows(); ++r)
      for (std::size_t c = 0; c < gx.cols(); ++c) gx(r, c) += g[c] * inv;
  });
}

Var normalize_rows(Var x) {
  Tape& t = *x.tape();
  const Matrix& xv = x.value();
  Matrix out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const double n = norm(xv.row_span(r));
    if (!(n > kNormEpsilon)) fail(ErrorKind::NearZeroNorm, "normalize_rows");
    for (double& v : out.row_span(r)) v /= n;
  }
  const auto ix = x.id();
  return t.push("normalize_rows", std::move(out), {ix}, [ix](Tape& tp, std::size_t self) {
    if (!tp.requires_grad(ix)) return;
    const Matrix& g = tp.grad(Var(&tp, self));
    const Matrix& y = tp.value_of(self);
    const Matrix& xv = tp.value_of(ix);
    Matrix& gx = tp.grad_ref(ix);
    // d(x/|x|) = (I - y y^T) / |x|
    for (std::size_t r = 0; r < y.rows(); ++r) {
      const double n = norm(xv.row_span(r));
      const double gy = dot(g.row_span(r), y.row_span(r));
      for (std::size_t c = 0; c < y.cols(); ++c) gx(r, c) += (g(r, c) - gy * y(r, c)) / n;
    }
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) fail(ErrorKind::DimensionMismatch, "concat_rows of nothing");
  Tape& t = *parts.front().tape();
  const std::size_t cols = parts.front().cols();
  std::size_t rows = 0;
  std::vector<std::size_t> ids;
  for (const Var& p : parts) {
    if (p.tape() != &t) fail(ErrorKind::DimensionMismatch, "operands on different tapes");
    if (p.cols() != cols) fail(ErrorKind::DimensionMismatch, "concat_rows: column mismatch");
    rows += p.rows();
    ids.push_back(p.id());
  }
  Matrix out(rows, cols);
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Matrix& v = p.value();
    std::copy(v.data(), v.data() + v.size(), out.data() + offset);
    offset += v.size();
  }
  auto parents = ids;
  return t.push("concat_rows", std::move(out), std::move(parents),
                [ids](Tape& tp, std::size_t self) {
                  const Matrix& g = tp.grad(Var(&tp, self));
                  std::size_t off = 0;
                  for (std::size_t id : ids) {
                    const std::size_t n = tp.value_of(id).size();
                    if (tp.requires_grad(id)) {
                      Matrix& gp = tp.grad_ref(id);
                      for (std::size_t i = 0; i < n; ++i) gp[i] += g[off + i];
                    }
                    off += n;
                  }
                });
}

Var slice_rows(Var x, std::size_t begin, std::size_t count) {
  Tape& t = *x.tape();
  const Matrix& xv = x.value();
  if (begin + count > xv.rows()) fail(ErrorKind::IndexOutOfRange, "slice_rows");
  Matrix out(count, xv.cols());
  std::copy(xv.data() + begin * xv.cols(), xv.data() + (begin + count) * xv.cols(), out.data());
  const auto ix = x.id();
  return t.push("slice_rows", std::move(out), {ix}, [ix, begin](Tape& tp, std::size_t self) {
    if (!tp.requires_grad(ix)) return;
    const Matrix& g = tp.grad(Var(&tp, self));
    Matrix& gx = tp.grad_ref(ix);
    const std::size_t off = begin * gx.cols();
    for (std::size_t i = 0; i < g.size(); ++i) gx[off + i] += g[i];
  });
}

namespace {

double row_logsumexp(std::span<const double> row) {
  const double peak = *std::max_element(row.begin(), row.end());
  double s = 0.0;
  for (double v : row) s += std::exp(v - peak);
  return peak + std::log(s);
}

}  // namespace

Var log_softmax_rows(Var x) {
  Tape& t = *x.tape();
  const Matrix& xv = x.value();
  if (xv.cols() == 0) fail(ErrorKind::DimensionMismatch, "log_softmax of empty row");
  Matrix out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const double lse = row_logsumexp(xv.row_span(r));
    for (double& v : out.row_span(r)) v -= lse;
  }
  const auto ix = x.id();
  return t.push("log_softmax_rows", std::move(out), {ix}, [ix](Tape& tp, std::size_t self) {
    if (!tp.requires_grad(ix)) return;
    const Matrix& g = tp.grad(Var(&tp, self));
    const Matrix& y = tp.value_of(self);
    Matrix& gx = tp.grad_ref(ix);
    for (std::size_t r = 0; r < y.rows(); ++r) {
      double gs = 0.0;
      for (std::size_t c = 0; c < y.cols(); ++c) gs += g(r, c);
      for (std::size_t c = 0; c < y.cols(); ++c) gx(r, c) += g(r, c) - std::exp(y(r, c)) * gs;
    }
  });
}

Var logsumexp_rows(Var x) {
  return segment_logsumexp_rows(x, {x.cols()});
}

Var segment_logsumexp_rows(Var x, const std::vector<std::size_t>& segment_sizes) {
  Tape& t = *x.tape();
  const Matrix& xv = x.value();
  std::size_t total = 0;
  for (std::size_t s : segment_sizes) {
    if (s == 0) fail(ErrorKind::EmptyAttributeSet, "empty segment in logsumexp");
    total += s;
  }
  if (total != xv.cols()) fail(ErrorKind::DimensionMismatch, "segments do not cover columns");
  Matrix out(xv.rows(), segment_sizes.size());
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    auto row = xv.row_span(r);
    std::size_t off = 0;
    for (std::size_t s = 0; s < segment_sizes.size(); ++s) {
      out(r, s) = row_logsumexp(row.subspan(off, segment_sizes[s]));
      off += segment_sizes[s];
    }
  }
  const auto ix = x.id();
  return t.push("segment_logsumexp_rows", std::move(out), {ix},
                [ix, segment_sizes](Tape& tp, std::size_t self) {
                  if (!tp.requires_grad(ix)) return;
                  const Matrix& g = tp.grad(Var(&tp, self));
                  const Matrix& y = tp.value_of(self);
                  const Matrix& xv = tp.value_of(ix);
                  Matrix& gx = tp.grad_ref(ix);
                  for (std::size_t r = 0; r < xv.rows(); ++r) {
                    std::size_t off = 0;
                    for (std::size_t s = 0; s < segment_sizes.size(); ++s) {
                      for (std::size_t c = off; c < off + segment_sizes[s]; ++c) {
                        gx(r, c) += g(r, s) * std::exp(xv(r, c) - y(r, s));
                      }
                      off += segment_sizes[s];
                    }
                  }
                });
}

Var gather_rows(Var x, const std::vector<std::size_t>& index) {
  Tape& t = *x.tape();
  const Matrix& xv = x.value();
  if (index.size() != xv.rows()) fail(ErrorKind::DimensionMismatch, "gather_rows: index size");
  Matrix out(xv.rows(), 1);
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    if (index[r] >= xv.cols()) fail(ErrorKind::IndexOutOfRange, "gather_rows");
    out[r] = xv(r, index[r]);
  }
  const auto ix = x.id();
  return t.push("gather_rows", std::move(out), {ix}, [ix, index](Tape& tp, std::size_t self) {
    if (!tp.requires_grad(ix)) return;
    const Matrix& g = tp.grad(Var(&tp, self));
    Matrix& gx = tp.grad_ref(ix);
    for (std::size_t r = 0; r < index.size(); ++r) gx(r, index[r]) += g[r];
  });
}

Var sum(Var x) {
  Tape& t = *x.tape();
  const Matrix& xv = x.value();
  Matrix out(1, 1);
  for (std::size_t i = 0; i < xv.size(); ++i) out[0] += xv[i];
  const auto ix = x.id();
  return t.push("sum", std::move(out), {ix}, [ix](Tape& tp, std::size_t self) {
    if (!tp.requires_grad(ix)) return;
    const double g = tp.grad(Var(&tp, self))[0];
    Matrix& gx = tp.grad_ref(ix);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g;
  });
}

Var mean(Var x) {
  const std::size_t n = x.value().size();
  if (n == 0) fail(ErrorKind::DimensionMismatch, "mean of empty node");
  return scale(sum(x), 1.0 / static_cast<double>(n));
}

GradientReport gradient_check(const LossBuilder& loss, const Matrix& params, double epsilon) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    fail(ErrorKind::InvalidConfig, "gradient_check epsilon outside [1e-7, 1e-3]");
  }
  GradientReport report;
  {
    Tape tape;
    Var p = tape.parameter(params);
    Var l = loss(tape, p);
    if (!std::isfinite(l.scalar())) fail(ErrorKind::NonFiniteLoss, "loss is not finite");
    tape.backward(l);
    report.analytic = tape.grad(p);
  }
  auto evaluate = [&](const Matrix& at) {
    Tape tape;
    Var p = tape.constant(at);
    const double v = loss(tape, p).scalar();
    if (!std::isfinite(v)) fail(ErrorKind::NonFiniteLoss, "loss is not finite");
    return v;
  };
  report.numeric = Matrix(params.rows(), params.cols());
  Matrix probe = params;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double original = probe[i];
    probe[i] = original + epsilon;
    const double up = evaluate(probe);
    probe[i] = original - epsilon;
    const double down = evaluate(probe);
    probe[i] = original;
    report.numeric[i] = (up - down) / (2.0 * epsilon);
    const double a = report.analytic[i];
    const double n = report.numeric[i];
    const double abs_err = std::abs(a - n);
    const double denom = std::max({std::abs(a), std::abs(n), 1e-8});
    report.max_abs_err = std::max(report.max_abs_err, abs_err);
    report.max_rel_err = std::max(report.max_rel_err, abs_err / denom);
  }
  return report;
}

}  // namespace argue::ad
