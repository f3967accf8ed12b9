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

// Generated book inventories and noisy recognitions of their titles.

#ifndef SHELFREAD_TESTS_SUPPORT_CORPUS_H_
#define SHELFREAD_TESTS_SUPPORT_CORPUS_H_

#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "shelfread/retrieval.h"

namespace shelfread::testing {

inline std::string RandomWord(std::mt19937_64& rng, int min_len, int max_len) {
  const int len = min_len + static_cast<int>(rng() % static_cast<uint64_t>(max_len - min_len + 1));
  std::string w;
  for (int i = 0; i < len; ++i) w.push_back(static_cast<char>('a' + rng() % 26));
  return w;
}

struct CorpusConfig {
  int records = 1000;
  int title_vocabulary = 2500;
  int min_title_words = 2;
  int max_title_words = 5;
  int authors = 300;
  int publishers = 40;
};

// Titles draw words from a fixed random vocabulary, so common words repeat
// across books; meta holds an author, a publisher and sometimes a volume.
inline std::vector<BookRecord> GenerateCorpus(uint64_t seed, const CorpusConfig& cfg = {}) {
  std::mt19937_64 rng(seed);
  std::set<std::string> seen;
  std::vector<std::string> words;
  while (static_cast<int>(words.size()) < cfg.title_vocabulary) {
    std::string w = RandomWord(rng, 4, 10);
    if (seen.insert(w).second) words.push_back(w);
  }
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  std::vector<std::string> authors, publishers;
  for (int i = 0; i < cfg.authors; ++i) {
    authors.push_back(RandomWord(rng, 3, 7) + " " + RandomWord(rng, 4, 9));
  }
  for (int i = 0; i < cfg.publishers; ++i) publishers.push_back(RandomWord(rng, 5, 9) + " press");

  std::vector<BookRecord> out;
  for (int i = 0; i < cfg.records; ++i) {
    BookRecord r;
    std::ostringstream id;
    id << "978" << (1000000 + i * 7 + static_cast<int>(seed % 7));
    r.id = id.str();
    const int n = cfg.min_title_words +
                  static_cast<int>(rng() % static_cast<uint64_t>(cfg.max_title_words -
                                                                 cfg.min_title_words + 1));
    for (int w = 0; w < n; ++w) {
      if (w) r.title += ' ';
      std::string word = pick(words);
      if (rng() % 2) word[0] = static_cast<char>(word[0] - 'a' + 'A');
      r.title += word;
    }
    r.meta.push_back(pick(authors));
    r.meta.push_back(pick(publishers));
    if (rng() % 4 == 0) r.meta.push_back("vol " + std::to_string(1 + rng() % 9));
    if (rng() % 2) r.location = "stack " + std::to_string(rng() % 20);
    out.push_back(std::move(r));
  }
  return out;
}

// `edits` random single-character substitutions, insertions or deletions.
inline std::string CorruptWord(const std::string& word, int edits, std::mt19937_64& rng) {
  std::string w = word;
  for (int e = 0; e < edits; ++e) {
    const char c = static_cast<char>('a' + rng() % 26);
    const int op = w.size() > 1 ? static_cast<int>(rng() % 3) : static_cast<int>(rng() % 2);
    if (op == 0) {
      w[rng() % w.size()] = c;
    } else if (op == 1) {
      w.insert(w.begin() + static_cast<long>(rng() % (w.size() + 1)), c);
    } else {
      w.erase(w.begin() + static_cast<long>(rng() % w.size()));
    }
  }
  return w;
}

inline std::string CorruptTitle(const std::string& title, int edits_per_word, std::mt19937_64& rng) {
  std::istringstream in(title);
  std::string word, out;
  while (in >> word) {
    if (!out.empty()) out += ' ';
    out += CorruptWord(word, edits_per_word, rng);
  }
  return out;
}

}  // namespace shelfread::testing

#endif  // SHELFREAD_TESTS_SUPPORT_CORPUS_H_
