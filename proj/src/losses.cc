/* Copyright 2026 The Shelfread Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "shelfread/losses.h"

#include <cmath>
#include <stdexcept>

#include "shelfread/decode.h"
#include "shelfread/editdist.h"

namespace shelfread {

PerTimestepTarget AssignPerTimestepLabels(const CharSpanAnnotation& ann) {
  PerTimestepTarget z;
  z.labels.assign(ann.receptive_fields.size(), kBlank);
  for (size_t i = 0; i < ann.receptive_fields.size(); ++i) {
    const Interval& rf = ann.receptive_fields[i];
    int best_overlap = 0;
    for (const CharSpan& span : ann.spans) {
      const int width = span.extent.length();
      if (width == 0) continue;
      const int overlap = OverlapLength(rf, span.extent);
      // overlap > width / 2, kept in integers
      if (2 * overlap <= width) continue;
      if (overlap > best_overlap) {
        best_overlap = overlap;
        z.labels[i] = span.label;
      }
    }
  }
  return z;
}

LossResult PerTimestepLossAndGrad(const Matrix& logits, const PerTimestepTarget& z) {
  const auto T = logits.rows();
  if (z.size() != T) {
    throw std::invalid_argument("per-timestep target length " +
                                std::to_string(z.size()) + " != T " +
                                std::to_string(T));
  }
  const Matrix log_probs = LogSoftmax(logits);
  LossResult result;
  result.grad = log_probs.array().exp().matrix();
  double sum = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const Label c = z.labels[t];
    if (c < 0 || c >= logits.cols()) {
      throw std::invalid_argument("per-timestep label outside logit classes");
    }
    sum -= log_probs(t, c);
    result.grad(t, c) -= 1.0;
  }
  result.loss = sum / static_cast<double>(T);
  result.grad /= static_cast<double>(T);
  result.components.pt = result.loss;
  return result;
}

LambdaSchedule::LambdaSchedule(double lambda0, double decay)
    : lambda0_(lambda0), decay_(decay) {
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
    throw std::invalid_argument("lambda0 must be positive and finite");
  }
  if (!(decay > 0.0 && decay <= 1.0)) {
    throw std::invalid_argument("lambda decay must lie in (0, 1]");
  }
}

double LambdaSchedule::ValueAt(int epoch) const {
  return lambda0_ * std::pow(decay_, static_cast<double>(epoch));
}

void LambdaSchedule::SetEpoch(int epoch) {
  if (epoch < 0) throw std::invalid_argument("epoch must be >= 0");
  epoch_ = epoch;
}

LossResult WctcLossAndGrad(const Matrix& logits, const LabelSequence& y) {
  LossResult result = CtcLossAndGrad(logits, y);
  const DecodeResult decoded = BestPathDecode(EmissionMatrix::FromLogits(logits));
  const int distance = EditDistance(y.items, decoded.sequence.items);
  result.components.edit_distance = distance;
  if (!result.ok()) {
    result.components.wctc = result.loss;
    return result;
  }
  result.loss *= distance;
  result.grad *= static_cast<double>(distance);
  result.components.wctc = result.loss;
  return result;
}

LossResult CombinedLoss(const Matrix& logits, const LabelSequence& y,
                        const PerTimestepTarget& z, double lambda,
                        SequenceTerm term) {
  LossResult result = term == SequenceTerm::kWctc ? WctcLossAndGrad(logits, y)
                                                  : CtcLossAndGrad(logits, y);
  result.components.lambda = lambda;
  if (!result.ok()) return result;
  if (lambda == 0.0) {
    // Still report the per-timestep value for curve logging.
    if (z.size() == logits.rows()) {
      result.components.pt = PerTimestepLossAndGrad(logits, z).loss;
    }
    return result;
  }
  const LossResult pt = PerTimestepLossAndGrad(logits, z);
  result.loss += lambda * pt.loss;
  result.grad += lambda * pt.grad;
  result.components.pt = pt.loss;
  return result;
}

LambdaInit InitialLambda(std::span<const LambdaSample> batch) {
  LambdaInit init;
  double ctc_sum = 0.0;
  double pt_sum = 0.0;
  int n = 0;
  for (const LambdaSample& s : batch) {
    const LossResult ctc = CtcLossAndGrad(s.logits, s.target);
    if (!ctc.ok()) continue;
    const LossResult pt = PerTimestepLossAndGrad(s.logits, s.pt_target);
    ctc_sum += ctc.grad.norm();
    pt_sum += pt.grad.norm();
    ++n;
  }
  if (n == 0) {
    init.degenerate = true;
    return init;
  }
  init.mean_ctc_grad_norm = ctc_sum / n;
  init.mean_pt_grad_norm = pt_sum / n;
  if (!(init.mean_pt_grad_norm > 0.0) || !(init.mean_ctc_grad_norm > 0.0)) {
    init.degenerate = true;
    init.lambda0 = 1.0;
    return init;
  }
  init.lambda0 = init.mean_ctc_grad_norm / init.mean_pt_grad_norm;
  return init;
}

}  // namespace shelfread
