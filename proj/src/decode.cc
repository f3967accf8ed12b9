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

#include "shelfread/decode.h"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace shelfread {

std::vector<Label> ArgmaxPath(const Matrix& probs) {
  std::vector<Label> path(probs.rows());
  for (Eigen::Index t = 0; t < probs.rows(); ++t) {
    Label best = 0;
    for (Eigen::Index c = 1; c < probs.cols(); ++c) {
      if (probs(t, c) > probs(t, best)) best = static_cast<Label>(c);
    }
    path[t] = best;
  }
  return path;
}

DecodeResult BestPathDecode(const EmissionMatrix& x) {
  const std::vector<Label> path = ArgmaxPath(x.probs());
  DecodeResult result;
  result.log_score = 0.0;
  for (size_t t = 0; t < path.size(); ++t) {
    const double p = x.probs()(static_cast<Eigen::Index>(t), path[t]);
    result.log_score += p > 0.0 ? std::log(p) : kLogZero;
  }
  result.sequence = Collapse(path);
  result.alternates.push_back({result.sequence, result.log_score});
  return result;
}

namespace {

struct PrefixMass {
  double blank = kLogZero;     // paths ending in blank
  double non_blank = kLogZero; // paths ending in the prefix's last label
  double total() const { return LogSumExp(blank, non_blank); }
};

using Beam = std::map<std::vector<Label>, PrefixMass>;

// Keeps the `width` prefixes with the highest total mass. Equal masses keep
// the lexicographically smaller prefix.
void Prune(Beam& beam, int width) {
  if (static_cast<int>(beam.size()) <= width) return;
  std::vector<std::pair<double, const std::vector<Label>*>> ranked;
  ranked.reserve(beam.size());
  for (const auto& [prefix, mass] : beam) ranked.emplace_back(mass.total(), &prefix);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  Beam kept;
  for (int i = 0; i < width; ++i) {
    auto node = beam.extract(*ranked[i].second);
    kept.insert(std::move(node));
  }
  beam.swap(kept);
}

}  // namespace

DecodeResult BeamSearchDecode(const EmissionMatrix& x, int beam_width) {
  if (beam_width < 1) throw std::invalid_argument("beam_width must be >= 1");
  const Matrix lp = x.LogProbs();
  const int T = x.timesteps();
  const int C = x.class_count();

  Beam beam;
  beam[{}] = PrefixMass{0.0, kLogZero};
  for (int t = 0; t < T; ++t) {
    Beam next;
    for (const auto& [prefix, mass] : beam) {
      const double total = mass.total();
      PrefixMass& same = next[prefix];
      same.blank = LogSumExp(same.blank, total + lp(t, kBlank));
      const Label last = prefix.empty() ? -1 : prefix.back();
      if (last >= 0) {
        same.non_blank = LogSumExp(same.non_blank, mass.non_blank + lp(t, last));
      }
      for (Label c = 1; c < C; ++c) {
        if (lp(t, c) == kLogZero) continue;
        std::vector<Label> extended = prefix;
        extended.push_back(c);
        PrefixMass& ext = next[extended];
        // A repeated label only opens a new symbol after a blank.
        const double from = (c == last) ? mass.blank : total;
        ext.non_blank = LogSumExp(ext.non_blank, from + lp(t, c));
      }
    }
    Prune(next, beam_width);
    beam.swap(next);
  }

  DecodeResult result;
  for (const auto& [prefix, mass] : beam) {
    if (mass.total() == kLogZero) continue;
    result.alternates.push_back({LabelSequence{prefix}, mass.total()});
  }
  if (result.alternates.empty()) result.alternates.push_back({LabelSequence{}, kLogZero});
  std::stable_sort(result.alternates.begin(), result.alternates.end(),
                   [](const Hypothesis& a, const Hypothesis& b) {
                     return a.log_score > b.log_score;
                   });
  result.sequence = result.alternates.front().sequence;
  result.log_score = result.alternates.front().log_score;
  return result;
}

}  // namespace shelfread
