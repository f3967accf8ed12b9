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

// Shared sequence types for the CTC family: the label alphabet, target label
// sequences, per-timestep alignments, emission matrices and the collapse
// mapping that turns an alignment into a label sequence.

#ifndef SHELFREAD_SEQCORE_H_
#define SHELFREAD_SEQCORE_H_

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace shelfread {

using Label = int;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// The blank occupies class 0 on the wire; non-blank labels are 1..C-1.
inline constexpr Label kBlank = 0;
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

struct LabelSequence {
  std::vector<Label> items;

  int size() const { return static_cast<int>(items.size()); }
  bool empty() const { return items.empty(); }
  bool operator==(const LabelSequence&) const = default;
  auto operator<=>(const LabelSequence&) const = default;
};

// A per-timestep path over the blank-extended alphabet.
struct Alignment {
  std::vector<Label> items;

  int size() const { return static_cast<int>(items.size()); }
  bool operator==(const Alignment&) const = default;
  auto operator<=>(const Alignment&) const = default;
};

class Alphabet {
 public:
  // Throws std::invalid_argument on duplicate symbols or an empty set.
  explicit Alphabet(std::u32string symbols);
  static Alphabet FromUtf8(std::string_view symbols);
  // The first `count` lowercase letters followed by digits.
  static Alphabet Default(int count);

  int class_count() const { return static_cast<int>(symbols_.size()) + 1; }
  int label_count() const { return static_cast<int>(symbols_.size()); }
  const std::u32string& symbols() const { return symbols_; }
  bool IsValidLabel(Label l) const { return l >= 1 && l < class_count(); }

  // Throws std::invalid_argument when a character is outside the alphabet.
  LabelSequence Encode(std::string_view utf8) const;
  // Blank renders as '-'.
  std::string Decode(const std::vector<Label>& labels) const;
  std::string Decode(const LabelSequence& seq) const { return Decode(seq.items); }

 private:
  std::u32string symbols_;
};

// T x C per-timestep label distributions. Rows sum to one within 1e-9.
class EmissionMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-9;

  // Throws std::invalid_argument if probs is not a valid stochastic matrix.
  explicit EmissionMatrix(Matrix probs);
  static EmissionMatrix FromLogits(const Matrix& logits);

  int timesteps() const { return static_cast<int>(probs_.rows()); }
  int class_count() const { return static_cast<int>(probs_.cols()); }
  const Matrix& probs() const { return probs_; }
  bool has_logits() const { return has_logits_; }
  const Matrix& logits() const { return logits_; }
  // Elementwise natural log, -inf for zero entries.
  Matrix LogProbs() const;

 private:
  Matrix probs_;
  Matrix logits_;
  bool has_logits_ = false;
};

// Row-wise softmax and log-softmax of a score matrix.
Matrix Softmax(const Matrix& logits);
Matrix LogSoftmax(const Matrix& logits);

// log(exp(a) + exp(b)) with -inf as the additive identity.
inline double LogSumExp(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

// Text grid: first line "T C", then T lines of C values.
EmissionMatrix ReadEmissionMatrix(std::istream& in);
void WriteEmissionMatrix(std::ostream& out, const EmissionMatrix& m);
Matrix ReadGrid(std::istream& in);
void WriteGrid(std::ostream& out, const Matrix& m);

// Merges adjacent repeats, then removes blanks.
LabelSequence Collapse(const Alignment& a);
LabelSequence Collapse(const std::vector<Label>& path);

// Shortest alignment length that can collapse to y: one frame per label plus
// a separating blank between each pair of equal neighbours.
int MinAlignmentLength(const LabelSequence& y);

// Default guard on class_count^T for exhaustive enumeration.
inline constexpr std::uint64_t kDefaultEnumerationCap = 1u << 22;

// Every length-T path over `class_count` classes that collapses to y, in
// lexicographic order. Throws std::invalid_argument when class_count^T
// exceeds `cap`.
std::vector<Alignment> EnumerateInverse(const LabelSequence& y, int timesteps,
                                        int class_count,
                                        std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace shelfread

#endif  // SHELFREAD_SEQCORE_H_
