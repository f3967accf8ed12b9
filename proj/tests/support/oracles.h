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

// Independent reference implementations used to check the library: plain
// enumeration, textbook dynamic programs and dense linear algebra.

#ifndef SHELFREAD_TESTS_SUPPORT_ORACLES_H_
#define SHELFREAD_TESTS_SUPPORT_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "shelfread/retrieval.h"
#include "shelfread/seqcore.h"

namespace shelfread::oracle {

// Merge runs, drop blanks, written out longhand.
inline std::vector<int> Collapse(const std::vector<int>& path) {
  std::vector<int> out;
  int prev = -1;
  for (int l : path) {
    if (l != prev && l != 0) out.push_back(l);
    prev = l;
  }
  return out;
}

// Calls fn(path) for each of the C^T paths in lexicographic order.
inline void ForEachPath(int T, int C, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> path(T, 0);
  while (true) {
    fn(path);
    int t = T - 1;
    while (t >= 0 && path[t] == C - 1) path[t--] = 0;
    if (t < 0) return;
    ++path[t];
  }
}

inline double PathProb(const Matrix& probs, const std::vector<int>& path) {
  double p = 1.0;
  for (size_t t = 0; t < path.size(); ++t) p *= probs(static_cast<Eigen::Index>(t), path[t]);
  return p;
}

// P(y | probs) by summing every path, linear domain.
inline double CtcProb(const Matrix& probs, const std::vector<int>& y) {
  double total = 0.0;
  ForEachPath(static_cast<int>(probs.rows()), static_cast<int>(probs.cols()),
              [&](const std::vector<int>& path) {
                if (Collapse(path) == y) total += PathProb(probs, path);
              });
  return total;
}

// Probability of every label sequence with nonzero mass.
inline std::map<std::vector<int>, double> SequenceProbs(const Matrix& probs) {
  std::map<std::vector<int>, double> out;
  ForEachPath(static_cast<int>(probs.rows()), static_cast<int>(probs.cols()),
              [&](const std::vector<int>& path) { out[Collapse(path)] += PathProb(probs, path); });
  return out;
}

// Highest single-path probability among paths collapsing to y.
inline double BestPathProbFor(const Matrix& probs, const std::vector<int>& y) {
  double best = 0.0;
  ForEachPath(static_cast<int>(probs.rows()), static_cast<int>(probs.cols()),
              [&](const std::vector<int>& path) {
                if (Collapse(path) == y) best = std::max(best, PathProb(probs, path));
              });
  return best;
}

// Full (n+1) x (m+1) Levenshtein table.
template <typename S>
int EditDistance(const S& a, const S& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1));
  for (size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
  for (size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[n][m];
}

inline Matrix NumericGradient(const std::function<double(const Matrix&)>& f, const Matrix& x,
                              double step = 1e-5) {
  Matrix g(x.rows(), x.cols());
  Matrix probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double orig = probe.data()[i];
    probe.data()[i] = orig + step;
    const double up = f(probe);
    probe.data()[i] = orig - step;
    const double down = f(probe);
    probe.data()[i] = orig;
    g.data()[i] = (up - down) / (2.0 * step);
  }
  return g;
}

// max |a - n| / max(|a|, |n|, floor) over all entries.
inline double MaxRelativeError(const Matrix& analytic, const Matrix& numeric, double floor = 1e-6) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double a = analytic.data()[i], n = numeric.data()[i];
    worst = std::max(worst, std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor}));
  }
  return worst;
}

inline Matrix SoftmaxRows(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    double z = 0.0;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) z += std::exp(logits(t, c) - m);
    for (Eigen::Index c = 0; c < logits.cols(); ++c) p(t, c) = std::exp(logits(t, c) - m) / z;
  }
  return p;
}

struct ScoredId {
  std::string id;
  double score;
};

// Dense tf-idf cosine ranking by scanning every document. Document vectors
// are built once; each query is scored against all of them.
class LinearScan {
 public:
  explicit LinearScan(const std::vector<BookRecord>& records) {
    std::vector<std::map<std::string, int>> tf(records.size());
    for (size_t d = 0; d < records.size(); ++d) {
      ids_.push_back(records[d].id);
      std::vector<std::string> toks = Tokenize(records[d].title);
      for (const std::string& m : records[d].meta) {
        for (std::string& t : Tokenize(m)) toks.push_back(std::move(t));
      }
      for (const std::string& t : toks) {
        ++tf[d][t];
        vocab_.emplace(t, 0);
      }
    }
    int next = 0;
    for (auto& [t, i] : vocab_) i = next++;
    const size_t V = vocab_.size();
    std::vector<int> df(V, 0);
    for (const auto& doc : tf) {
      for (const auto& [t, c] : doc) ++df[vocab_.at(t)];
    }
    idf_.assign(V, 0.0);
    for (size_t i = 0; i < V; ++i) idf_[i] = std::log(static_cast<double>(records.size()) / df[i]);
    for (const auto& doc : tf) {
      std::vector<double> v(V, 0.0);
      for (const auto& [t, c] : doc) v[vocab_.at(t)] = c * idf_[vocab_.at(t)];
      double dn = 0.0;
      for (size_t i = 0; i < V; ++i) dn += v[i] * v[i];
      docs_.push_back(std::move(v));
      norms_.push_back(std::sqrt(dn));
    }
  }

  std::vector<ScoredId> Rank(const std::vector<std::string>& query_terms, int k) const {
    const size_t V = vocab_.size();
    std::vector<double> q(V, 0.0);
    for (const std::string& t : query_terms) {
      auto it = vocab_.find(t);
      if (it != vocab_.end()) q[it->second] += 1.0;
    }
    double qn = 0.0;
    for (size_t i = 0; i < V; ++i) {
      q[i] *= idf_[i];
      qn += q[i] * q[i];
    }
    qn = std::sqrt(qn);
    std::vector<ScoredId> out;
    if (qn == 0.0) return out;
    for (size_t d = 0; d < docs_.size(); ++d) {
      double dot = 0.0;
      for (size_t i = 0; i < V; ++i) dot += docs_[d][i] * q[i];
      if (norms_[d] == 0.0 || dot <= 0.0) continue;
      out.push_back({ids_[d], dot / (qn * norms_[d])});
    }
    std::sort(out.begin(), out.end(), [](const ScoredId& a, const ScoredId& b) {
      return a.score != b.score ? a.score > b.score : a.id < b.id;
    });
    if (static_cast<int>(out.size()) > k) out.resize(k);
    return out;
  }

 private:
  std::vector<std::string> ids_;
  std::map<std::string, int> vocab_;
  std::vector<double> idf_;
  std::vector<std::vector<double>> docs_;
  std::vector<double> norms_;
};

inline std::vector<ScoredId> LinearScanRanking(const std::vector<BookRecord>& records,
                                               const std::vector<std::string>& query_terms,
                                               int k) {
  return LinearScan(records).Rank(query_terms, k);
}

}  // namespace shelfread::oracle

#endif  // SHELFREAD_TESTS_SUPPORT_ORACLES_H_
