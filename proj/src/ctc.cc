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

#include "shelfread/ctc.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace shelfread {

std::vector<Label> ExtendWithBlanks(const LabelSequence& y) {
  std::vector<Label> ext(2 * y.items.size() + 1, kBlank);
  for (size_t j = 0; j < y.items.size(); ++j) ext[2 * j + 1] = y.items[j];
  return ext;
}

void CtcForwardBackward(const Matrix& log_probs, const LabelSequence& y,
                        CtcWorkspace& ws) {
  const int T = static_cast<int>(log_probs.rows());
  ws.extended_target = ExtendWithBlanks(y);
  const std::vector<Label>& ext = ws.extended_target;
  const int S = static_cast<int>(ext.size());

  ws.log_alpha.setConstant(T, S, kLogZero);
  ws.log_beta.setConstant(T, S, kLogZero);
  Matrix& alpha = ws.log_alpha;
  Matrix& beta = ws.log_beta;

  // A state may skip its predecessor blank when it is a label that differs
  // from the label two states back.
  auto can_skip = [&](int s) { return s >= 2 && ext[s] != kBlank && ext[s] != ext[s - 2]; };

  alpha(0, 0) = log_probs(0, ext[0]);
  if (S > 1) alpha(0, 1) = log_probs(0, ext[1]);
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      double acc = alpha(t - 1, s);
      if (s >= 1) acc = LogSumExp(acc, alpha(t - 1, s - 1));
      if (can_skip(s)) acc = LogSumExp(acc, alpha(t - 1, s - 2));
      if (acc != kLogZero) alpha(t, s) = acc + log_probs(t, ext[s]);
    }
  }

  beta(T - 1, S - 1) = log_probs(T - 1, ext[S - 1]);
  if (S > 1) beta(T - 1, S - 2) = log_probs(T - 1, ext[S - 2]);
  for (int t = T - 2; t >= 0; --t) {
    for (int s = S - 1; s >= 0; --s) {
      double acc = beta(t + 1, s);
      if (s + 1 < S) acc = LogSumExp(acc, beta(t + 1, s + 1));
      if (s + 2 < S && can_skip(s + 2)) acc = LogSumExp(acc, beta(t + 1, s + 2));
      if (acc != kLogZero) beta(t, s) = acc + log_probs(t, ext[s]);
    }
  }
}

namespace {

double FinalLogLikelihood(const CtcWorkspace& ws) {
  const Matrix& alpha = ws.log_alpha;
  const auto T = alpha.rows();
  const auto S = alpha.cols();
  double ll = alpha(T - 1, S - 1);
  if (S > 1) ll = LogSumExp(ll, alpha(T - 1, S - 2));
  return ll;
}

}  // namespace

CtcLogProb CtcLogProbability(const EmissionMatrix& x, const LabelSequence& y,
                             CtcWorkspace& ws) {
  if (x.timesteps() < MinAlignmentLength(y)) {
    return {kLogZero, CtcStatus::kInfeasible};
  }
  for (Label l : y.items) {
    if (l < 1 || l >= x.class_count()) {
      throw std::invalid_argument("target label outside emission classes");
    }
  }
  CtcForwardBackward(x.LogProbs(), y, ws);
  return {FinalLogLikelihood(ws), CtcStatus::kOk};
}

CtcLogProb CtcLogProbability(const EmissionMatrix& x, const LabelSequence& y) {
  CtcWorkspace ws;
  return CtcLogProbability(x, y, ws);
}

Matrix CtcPosteriors(const Matrix& log_probs, const CtcWorkspace& ws,
                     double log_likelihood) {
  const auto T = log_probs.rows();
  const auto C = log_probs.cols();
  const auto S = static_cast<Eigen::Index>(ws.extended_target.size());
  Matrix log_gamma = Matrix::Constant(T, C, kLogZero);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (Eigen::Index s = 0; s < S; ++s) {
      const Label c = ws.extended_target[s];
      const double a = ws.log_alpha(t, s);
      const double b = ws.log_beta(t, s);
      if (a == kLogZero || b == kLogZero) continue;
      log_gamma(t, c) = LogSumExp(log_gamma(t, c), a + b - log_probs(t, c));
    }
  }
  return (log_gamma.array() - log_likelihood).exp().matrix();
}

LossResult CtcLossAndGrad(const Matrix& logits, const LabelSequence& y) {
  LossResult result;
  const auto T = logits.rows();
  const auto C = logits.cols();
  for (Label l : y.items) {
    if (l < 1 || l >= C) throw std::invalid_argument("target label outside logit classes");
  }
  if (T < MinAlignmentLength(y)) {
    result.loss = std::numeric_limits<double>::infinity();
    result.grad = Matrix::Zero(T, C);
    result.status = CtcStatus::kInfeasible;
    result.components.ctc = result.loss;
    return result;
  }
  const Matrix log_probs = LogSoftmax(logits);
  CtcWorkspace ws;
  CtcForwardBackward(log_probs, y, ws);
  const double ll = FinalLogLikelihood(ws);
  result.loss = -ll;
  result.grad = log_probs.array().exp().matrix() - CtcPosteriors(log_probs, ws, ll);
  result.components.ctc = result.loss;
  return result;
}

double CtcBruteForce(const EmissionMatrix& x, const LabelSequence& y,
                     std::uint64_t cap) {
  const auto paths = EnumerateInverse(y, x.timesteps(), x.class_count(), cap);
  if (paths.empty()) return kLogZero;
  const Matrix& p = x.probs();
  double total = 0.0;
  for (const Alignment& a : paths) {
    double prod = 1.0;
    for (int t = 0; t < a.size(); ++t) prod *= p(t, a.items[t]);
    total += prod;
  }
  return total > 0.0 ? std::log(total) : kLogZero;
}

}  // namespace shelfread
