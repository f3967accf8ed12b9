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

#ifndef SHELFREAD_DECODE_H_
#define SHELFREAD_DECODE_H_

#include <vector>

#include "shelfread/seqcore.h"

namespace shelfread {

struct Hypothesis {
  LabelSequence sequence;
  double log_score = kLogZero;
};

struct DecodeResult {
  LabelSequence sequence;
  double log_score = kLogZero;
  // Ranked by descending log_score; for beam search the first entry is the
  // returned sequence itself.
  std::vector<Hypothesis> alternates;
};

// Index of the row maximum; ties resolve to the lowest index, so blank wins
// blank/label ties.
std::vector<Label> ArgmaxPath(const Matrix& probs);

// Collapse of the per-timestep argmax. log_score is the best path's log
// probability.
DecodeResult BestPathDecode(const EmissionMatrix& x);

// Prefix beam search keeping separate blank-ending and label-ending masses
// per collapsed prefix. log_score is the total probability of the returned
// prefix over the surviving paths. beam_width must be >= 1.
DecodeResult BeamSearchDecode(const EmissionMatrix& x, int beam_width);

}  // namespace shelfread

#endif  // SHELFREAD_DECODE_H_
