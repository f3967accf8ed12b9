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

// Synthetic aligned sequences with known character spans.
//
// Every target character emits a contiguous run of frames. A frame is a
// C-dimensional "soft one-hot" vector: 1 at the character's class, plus
// independent Gaussian noise of standard deviation noise_level on every
// component. Receptive fields of the output timesteps are
// [t * stride, t * stride + window).

#ifndef SHELFREAD_SYNTHGEN_H_
#define SHELFREAD_SYNTHGEN_H_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "shelfread/losses.h"
#include "shelfread/seqcore.h"

namespace shelfread {

struct SynthSample {
  Matrix input;  // T x D
  LabelSequence target;
  CharSpanAnnotation spans;
  double noise_level = 0.0;

  int timesteps() const { return static_cast<int>(input.rows()); }
};

struct SynthConfig {
  int min_length = 2;  // target length L range, inclusive
  int max_length = 6;
  int min_span = 2;  // frames per character, inclusive
  int max_span = 6;
  int window = 4;
  int stride = 1;
  double noise_level = 0.5;
  // Redraw a character equal to its left neighbour.
  bool forbid_adjacent_repeats = true;
};

// `count` samples over `alphabet`, deterministic in `seed`. Sample i uses its
// own generator seeded from (seed, i). Throws std::invalid_argument on an
// inconsistent config.
std::vector<SynthSample> GenerateSynthetic(std::uint64_t seed, const Alphabet& alphabet,
                                           int count, const SynthConfig& config);

std::vector<Interval> ReceptiveFields(int timesteps, int window, int stride);

// Batches of equal target length, groups in ascending L, sample order kept
// within a group. Returns indices into `samples`.
std::vector<std::vector<int>> BatchByLength(const std::vector<SynthSample>& samples,
                                            int batch_size);

// One record per line, tab separated:
//   target  spans  noise  window stride  T D v(0,0) v(0,1) ... v(T-1,D-1)
// spans are "label:start:end" joined by ','. Values use max_digits10.
void WriteDataset(std::ostream& out, const Alphabet& alphabet,
                  const std::vector<SynthSample>& samples);
std::vector<SynthSample> ReadDataset(std::istream& in, const Alphabet& alphabet);

}  // namespace shelfread

#endif  // SHELFREAD_SYNTHGEN_H_
