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

// Losses layered on CTC:
//
//  * per-timestep supervision: cross-entropy against one known alignment
//    derived from character spans and timestep receptive fields, added to CTC
//    with a decaying weight lambda;
//  * edit-distance weighted CTC: the CTC loss scaled by the edit distance
//    between the target and the best-path decoding.

#ifndef SHELFREAD_LOSSES_H_
#define SHELFREAD_LOSSES_H_

#include <span>
#include <vector>

#include "shelfread/ctc.h"

namespace shelfread {

// Half-open interval [start, end) in input-position units.
struct Interval {
  int start = 0;
  int end = 0;
  int length() const { return end > start ? end - start : 0; }
  bool operator==(const Interval&) const = default;
};

inline int OverlapLength(const Interval& a, const Interval& b) {
  const int lo = a.start > b.start ? a.start : b.start;
  const int hi = a.end < b.end ? a.end : b.end;
  return hi > lo ? hi - lo : 0;
}

struct CharSpan {
  Label label = kBlank;
  Interval extent;
  bool operator==(const CharSpan&) const = default;
};

struct CharSpanAnnotation {
  std::vector<CharSpan> spans;            // ordered, non-overlapping
  std::vector<Interval> receptive_fields; // one per output timestep
};

struct PerTimestepTarget {
  std::vector<Label> labels;
  int size() const { return static_cast<int>(labels.size()); }
};

// Timestep i takes the label of span j when its receptive field covers
// strictly more than half of span j. Several qualifying spans resolve to the
// largest overlap, then the leftmost span. Everything else is blank.
PerTimestepTarget AssignPerTimestepLabels(const CharSpanAnnotation& ann);

// Mean per-timestep cross-entropy (1/T) sum -log softmax(logits)(t, z_t).
LossResult PerTimestepLossAndGrad(const Matrix& logits, const PerTimestepTarget& z);

// lambda(epoch) = lambda0 * decay^epoch.
class LambdaSchedule {
 public:
  static constexpr double kDefaultDecay = 0.5;

  // Throws std::invalid_argument unless lambda0 > 0 and decay in (0, 1].
  explicit LambdaSchedule(double lambda0, double decay = kDefaultDecay);

  double lambda0() const { return lambda0_; }
  double decay() const { return decay_; }
  int epoch() const { return epoch_; }
  double value() const { return ValueAt(epoch_); }
  double ValueAt(int epoch) const;
  void Advance() { ++epoch_; }
  void SetEpoch(int epoch);

 private:
  double lambda0_;
  double decay_;
  int epoch_ = 0;
};

// Which sequence-level term the per-timestep loss is added to.
enum class SequenceTerm { kCtc, kWctc };

// sequence_term + lambda * L_pt. lambda == 0 returns the sequence term alone.
// components carries (ctc, pt, lambda) and, for kWctc, (wctc, edit_distance).
LossResult CombinedLoss(const Matrix& logits, const LabelSequence& y,
                        const PerTimestepTarget& z, double lambda,
                        SequenceTerm term = SequenceTerm::kCtc);
inline LossResult CombinedLoss(const Matrix& logits, const LabelSequence& y,
                               const PerTimestepTarget& z,
                               const LambdaSchedule& schedule,
                               SequenceTerm term = SequenceTerm::kCtc) {
  return CombinedLoss(logits, y, z, schedule.value(), term);
}

struct LambdaSample {
  Matrix logits;
  LabelSequence target;
  PerTimestepTarget pt_target;
};

struct LambdaInit {
  double lambda0 = 1.0;
  double mean_ctc_grad_norm = 0.0;
  double mean_pt_grad_norm = 0.0;
  // Set when the per-timestep gradients vanish and lambda0 falls back to 1.
  bool degenerate = false;
};

// lambda0 = mean ||grad CTC||_2 / mean ||grad L_pt||_2 over the feasible
// samples of the batch, so both terms start with equal gradient magnitude.
LambdaInit InitialLambda(std::span<const LambdaSample> batch);

// -log P(Y|X) * EditDistance(Y, Y_D) with Y_D the best-path decoding of
// softmax(logits). The distance is a constant for differentiation.
LossResult WctcLossAndGrad(const Matrix& logits, const LabelSequence& y);

}  // namespace shelfread

#endif  // SHELFREAD_LOSSES_H_
