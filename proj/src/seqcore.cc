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

#include "shelfread/seqcore.h"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "shelfread/utf8.h"

namespace shelfread {

Alphabet::Alphabet(std::u32string symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw std::invalid_argument("alphabet is empty");
  std::u32string sorted = symbols_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("alphabet contains duplicate symbols");
  }
}

Alphabet Alphabet::FromUtf8(std::string_view symbols) {
  return Alphabet(utf8::Decode(symbols));
}

Alphabet Alphabet::Default(int count) {
  static constexpr std::u32string_view kPool =
      U"abcdefghijklmnopqrstuvwxyz0123456789";
  if (count < 1 || count > static_cast<int>(kPool.size())) {
    throw std::invalid_argument("default alphabet supports 1.." +
                                std::to_string(kPool.size()) + " labels");
  }
  return Alphabet(std::u32string(kPool.substr(0, count)));
}

LabelSequence Alphabet::Encode(std::string_view text) const {
  LabelSequence out;
  for (char32_t c : utf8::Decode(text)) {
    const auto pos = symbols_.find(c);
    if (pos == std::u32string::npos) {
      throw std::invalid_argument("character '" + utf8::Encode(c) +
                                  "' is not in the alphabet");
    }
    out.items.push_back(static_cast<Label>(pos) + 1);
  }
  return out;
}

std::string Alphabet::Decode(const std::vector<Label>& labels) const {
  std::u32string out;
  for (Label l : labels) {
    if (l == kBlank) {
      out.push_back(U'-');
    } else if (IsValidLabel(l)) {
      out.push_back(symbols_[l - 1]);
    } else {
      throw std::invalid_argument("label " + std::to_string(l) +
                                  " outside alphabet");
    }
  }
  return utf8::Encode(out);
}

EmissionMatrix::EmissionMatrix(Matrix probs) : probs_(std::move(probs)) {
  if (probs_.rows() < 1 || probs_.cols() < 1) {
    throw std::invalid_argument("emission matrix must be non-empty");
  }
  for (Eigen::Index t = 0; t < probs_.rows(); ++t) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < probs_.cols(); ++c) {
      const double p = probs_(t, c);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("emission probability out of [0,1] at row " +
                                    std::to_string(t));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw std::invalid_argument("emission row " + std::to_string(t) +
                                  " does not sum to 1");
    }
  }
}

EmissionMatrix EmissionMatrix::FromLogits(const Matrix& logits) {
  EmissionMatrix m(Softmax(logits));
  m.logits_ = logits;
  m.has_logits_ = true;
  return m;
}

Matrix EmissionMatrix::LogProbs() const {
  return probs_.unaryExpr([](double p) { return p > 0.0 ? std::log(p) : kLogZero; });
}

Matrix Softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    out.row(t) = (logits.row(t).array() - m).exp();
    out.row(t) /= out.row(t).sum();
  }
  return out;
}

Matrix LogSoftmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    const double lse = m + std::log((logits.row(t).array() - m).exp().sum());
    out.row(t) = logits.row(t).array() - lse;
  }
  return out;
}

Matrix ReadGrid(std::istream& in) {
  long rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1) {
    throw std::runtime_error("grid header must be two positive integers");
  }
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      if (!(in >> m(r, c))) {
        throw std::runtime_error("grid truncated at row " + std::to_string(r));
      }
    }
  }
  return m;
}

void WriteGrid(std::ostream& out, const Matrix& m) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << m(r, c);
    }
    out << '\n';
  }
  out.precision(old);
}

EmissionMatrix ReadEmissionMatrix(std::istream& in) {
  return EmissionMatrix(ReadGrid(in));
}

void WriteEmissionMatrix(std::ostream& out, const EmissionMatrix& m) {
  WriteGrid(out, m.probs());
}

LabelSequence Collapse(const std::vector<Label>& path) {
  LabelSequence out;
  Label prev = -1;
  for (Label l : path) {
    if (l != prev && l != kBlank) out.items.push_back(l);
    prev = l;
  }
  return out;
}

LabelSequence Collapse(const Alignment& a) { return Collapse(a.items); }

int MinAlignmentLength(const LabelSequence& y) {
  int repeats = 0;
  for (int j = 1; j < y.size(); ++j) {
    if (y.items[j] == y.items[j - 1]) ++repeats;
  }
  return y.size() + repeats;
}

namespace {

// Depth-first walk over all paths, pruning prefixes whose collapse already
// disagrees with y.
void EnumerateFrom(const LabelSequence& y, int timesteps, int class_count,
                   std::vector<Label>& path, int matched, Label prev,
                   std::vector<Alignment>& out) {
  const int t = static_cast<int>(path.size());
  if (t == timesteps) {
    if (matched == y.size()) out.push_back(Alignment{path});
    return;
  }
  for (Label c = 0; c < class_count; ++c) {
    int next_matched = matched;
    if (c != kBlank && c != prev) {
      if (matched >= y.size() || y.items[matched] != c) continue;
      next_matched = matched + 1;
    }
    path.push_back(c);
    EnumerateFrom(y, timesteps, class_count, path, next_matched, c, out);
    path.pop_back();
  }
}

}  // namespace

std::vector<Alignment> EnumerateInverse(const LabelSequence& y, int timesteps,
                                        int class_count, std::uint64_t cap) {
  if (timesteps < 1) throw std::invalid_argument("timesteps must be >= 1");
  if (class_count < 1) throw std::invalid_argument("class_count must be >= 1");
  std::uint64_t space = 1;
  for (int t = 0; t < timesteps; ++t) {
    space *= static_cast<std::uint64_t>(class_count);
    if (space > cap) {
      throw std::invalid_argument("enumeration space " +
                                  std::to_string(class_count) + "^" +
                                  std::to_string(timesteps) + " exceeds cap");
    }
  }
  for (Label l : y.items) {
    if (l < 1 || l >= class_count) {
      throw std::invalid_argument("target label outside class range");
    }
  }
  std::vector<Alignment> out;
  std::vector<Label> path;
  path.reserve(timesteps);
  EnumerateFrom(y, timesteps, class_count, path, 0, -1, out);
  return out;
}

}  // namespace shelfread
