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

#ifndef SHELFREAD_EDITDIST_H_
#define SHELFREAD_EDITDIST_H_

#include <algorithm>
#include <iterator>
#include <numeric>
#include <ranges>
#include <vector>

namespace shelfread {

// Unit-cost Levenshtein distance (insert, delete, substitute) over any two
// random-access ranges with equality-comparable elements.
template <std::ranges::random_access_range A, std::ranges::random_access_range B>
int EditDistance(const A& a, const B& b) {
  const auto n = static_cast<int>(std::ranges::size(a));
  const auto m = static_cast<int>(std::ranges::size(b));
  if (n == 0) return m;
  if (m == 0) return n;
  const auto ai = std::ranges::begin(a);
  const auto bi = std::ranges::begin(b);

  std::vector<int> prev(m + 1), cur(m + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (int i = 1; i <= n; ++i) {
    cur[0] = i;
    for (int j = 1; j <= m; ++j) {
      const int sub = prev[j - 1] + (ai[i - 1] == bi[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace shelfread

#endif  // SHELFREAD_EDITDIST_H_
