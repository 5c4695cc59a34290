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
#include <vector>

#include "argue/autodiff.hpp"
#include "argue/numerics.hpp"

namespace argue {

// Plain-value forms. Embeddings are unit vectors; logits are cosine / tau.

// p(c|x) = softmax_c(cos(f, w_c^t) / tau).
Vector zero_shot_distribution(const Vector& f, const std::vector<Vector>& class_embeddings,
                              double tau);
// Same form over learnable class embeddings w_c^s.
Vector soft_prompt_distribution(const Vector& f, const std::vector<Vector>& class_embeddings,
                                double tau);
// p(y|x) = sum_j exp(cos(f, w_y^{s,j})/tau) / sum_c sum_j exp(cos(f, w_c^{s,j})/tau).
// Classes may hold different numbers of attributes.
Vector attribute_averaged_distribution(const Vector& f,
                                       const std::vector<std::vector<Vector>>& per_class,
                                       double tau);
// Mean cross entropy over a batch of distributions.
double classification_loss(const std::vector<Vector>& distributions,
                           const std::vector<std::size_t>& labels);
// Softmax of cos(w^s, w_c^{t,j}) / tau flattened class-major over (c, j).
Vector regularization_distribution(const Vector& soft,
                                   const std::vector<std::vector<Vector>>& textual, double tau);
// Mean over (c, j) of -log P(c, j | w_c^{s,j}).
double regularization_loss(const std::vector<std::vector<Vector>>& soft,
                           const std::vector<std::vector<Vector>>& textual, double tau);
Vector negative_distribution(const Vector& f, const std::vector<Vector>& negative_embeddings,
                             double tau);
// -(1/C) sum_c log p_c: ln C at the uniform distribution, larger elsewhere.
double negative_loss(const Vector& distribution);
double total_loss(double l_ent, double l_reg, double l_neg, double beta, double gamma);

namespace ad {

// Cosine logits of unit rows: (B x D) . (K x D)^T / tau -> (B x K).
Var cosine_logits(Var images, Var texts, double tau);
// Log of the attribute-averaged distribution: (B x C) from images (B x D),
// prompts (sum(segments) x D) grouped class-major into `segments`.
Var attribute_log_probs(Var images, Var prompts, const std::vector<std::size_t>& segments,
                        double tau);
// -mean_b log_probs(b, labels[b]).
Var classification_loss(Var log_probs, const std::vector<std::size_t>& labels);
// Each soft row's positive is the textual row with the same index.
Var regularization_loss(Var soft, Var textual, double tau);
// Batch mean of -(1/C) sum_c log P_n(c|x).
Var negative_loss(Var images, Var negatives, double tau);

}  // namespace ad
}  // namespace argue
