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

// Log-domain CTC: forward-backward lattice over the blank-interleaved target,
// the negative log-likelihood loss, its gradient with respect to pre-softmax
// scores, and an exhaustive-enumeration reference.

#ifndef SHELFREAD_CTC_H_
#define SHELFREAD_CTC_H_

#include <vector>

#include "shelfread/seqcore.h"

namespace shelfread {

enum class CtcStatus {
  kOk,
  // T is shorter than MinAlignmentLength(Y); probability is exactly zero.
  kInfeasible,
};

struct CtcLogProb {
  double value = kLogZero;
  CtcStatus status = CtcStatus::kOk;
  bool ok() const { return status == CtcStatus::kOk; }
};

// Caller-owned lattice buffers. Rows are timesteps, columns lattice states.
struct CtcWorkspace {
  Matrix log_alpha;
  Matrix log_beta;
  std::vector<Label> extended_target;
};

// Per-call loss bookkeeping, filled by whichever losses contributed.
struct LossComponents {
  double ctc = 0.0;
  double pt = 0.0;
  double lambda = 0.0;
  double wctc = 0.0;
  int edit_distance = 0;
};

struct LossResult {
  double loss = 0.0;
  Matrix grad;  // T x C, with respect to logits
  CtcStatus status = CtcStatus::kOk;
  LossComponents components;
  bool ok() const { return status == CtcStatus::kOk; }
};

// blank, y1, blank, y2, ..., yL, blank
std::vector<Label> ExtendWithBlanks(const LabelSequence& y);

// Fills ws.log_alpha and ws.log_beta from log emission probabilities. Both
// include the emission at their own timestep, so
// alpha(t,s) + beta(t,s) - log y(t, ext[s]) sums (in log space) to log P.
void CtcForwardBackward(const Matrix& log_probs, const LabelSequence& y,
                        CtcWorkspace& ws);

// log P(Y|X). Returns -inf with kInfeasible when T is too short.
CtcLogProb CtcLogProbability(const EmissionMatrix& x, const LabelSequence& y);
CtcLogProb CtcLogProbability(const EmissionMatrix& x, const LabelSequence& y,
                             CtcWorkspace& ws);

// -log P(Y|softmax(logits)) and its gradient softmax - posterior.
// Infeasible targets give loss +inf, a zero gradient and kInfeasible.
LossResult CtcLossAndGrad(const Matrix& logits, const LabelSequence& y);

// Per-timestep posterior label marginals gamma(t, c) from a filled workspace.
Matrix CtcPosteriors(const Matrix& log_probs, const CtcWorkspace& ws,
                     double log_likelihood);

// Exact log of the sum over EnumerateInverse(y, T) of the path products.
// Throws std::invalid_argument when C^T exceeds `cap`.
double CtcBruteForce(const EmissionMatrix& x, const LabelSequence& y,
                     std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace shelfread

#endif  // SHELFREAD_CTC_H_
