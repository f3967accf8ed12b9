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

// Book inventory search: a tf-idf inverted index over titles and metadata,
// nearest-neighbour correction of noisy recognised words against the index
// vocabulary, cosine-ranked queries and retrieval metrics.
//
// Weights are raw term frequency times idf = ln(N / df), with no smoothing.
// Documents and queries are compared by cosine similarity; hits with a zero
// score are never returned.

#ifndef SHELFREAD_RETRIEVAL_H_
#define SHELFREAD_RETRIEVAL_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace shelfread {

struct BookRecord {
  std::string id;
  std::string title;
  std::vector<std::string> meta;  // author, publisher, volume, ...
  std::optional<std::string> location;
  bool operator==(const BookRecord&) const = default;
};

// Lowercases, drops every code point that is neither alphanumeric nor
// whitespace ("o'brien" -> "obrien"), then splits on whitespace. Digits are
// kept.
std::vector<std::string> Tokenize(std::string_view text);

class DuplicateIdError : public std::invalid_argument {
 public:
  explicit DuplicateIdError(std::vector<std::string> ids);
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
};

class InvertedIndex {
 public:
  struct Posting {
    int doc = 0;  // position in records()
    int tf = 0;
  };

  // Throws DuplicateIdError naming every repeated id, or
  // std::invalid_argument for an empty title.
  static InvertedIndex Build(std::vector<BookRecord> records);

  int doc_count() const { return static_cast<int>(records_.size()); }
  const std::vector<BookRecord>& records() const { return records_; }
  std::optional<int> FindDocument(std::string_view id) const;

  // Sorted.
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  std::optional<int> TermId(std::string_view term) const;
  const std::vector<Posting>& postings(int term) const { return postings_[term]; }
  int DocumentFrequency(int term) const { return static_cast<int>(postings_[term].size()); }
  int CollectionFrequency(int term) const { return collection_freq_[term]; }
  double Idf(int term) const { return idf_[term]; }
  // L2 norm of the document's tf-idf vector.
  double DocumentNorm(int doc) const { return doc_norm_[doc]; }
  // (term, tf) of one document, ascending term id.
  const std::vector<std::pair<int, int>>& DocumentTerms(int doc) const { return doc_terms_[doc]; }
  const std::u32string& TermCodePoints(int term) const { return vocab_u32_[term]; }

  // Flat binary: magic, version, then the records. Loading rebuilds the
  // index deterministically.
  void Save(std::ostream& out) const;
  static InvertedIndex Load(std::istream& in);

 private:
  std::vector<BookRecord> records_;
  std::unordered_map<std::string, int> doc_ids_;
  std::vector<std::string> vocabulary_;
  std::vector<std::u32string> vocab_u32_;
  std::unordered_map<std::string, int> term_ids_;
  std::vector<std::vector<Posting>> postings_;
  std::vector<int> collection_freq_;
  std::vector<double> idf_;
  std::vector<double> doc_norm_;
  std::vector<std::vector<std::pair<int, int>>> doc_terms_;
};

// The vocabulary term closest in edit distance to the lowercased token when
// that distance is <= max_distance. Ties prefer the higher collection
// frequency, then the lexicographically smaller term. Otherwise the token is
// returned unchanged.
std::string DictionaryCorrect(std::string_view token, const InvertedIndex& index,
                              int max_distance);

struct RankedHit {
  std::string id;
  double score = 0.0;
  int rank = 0;  // 1-based
};

struct QueryOptions {
  static constexpr int kDefaultMaxDistance = 2;
  bool correct = true;
  int max_distance = kDefaultMaxDistance;
};

// Tokenizes every keyword string, optionally corrects each token against the
// vocabulary, then ranks documents by cosine similarity. Returns at most k
// hits sorted by descending score, ties by ascending id. Throws
// std::invalid_argument for k < 1.
std::vector<RankedHit> Query(const InvertedIndex& index, std::span<const std::string> keywords,
                             int k, const QueryOptions& options = {});

// Cosine ranking over already-normalised terms (no tokenization or correction).
std::vector<RankedHit> RankTerms(const InvertedIndex& index, std::span<const std::string> terms,
                                 int k);

struct EvalQuery {
  std::vector<std::string> keywords;
  std::string truth_id;
};

struct RetrievalMetrics {
  double precision_at_1 = 0.0;  // correct top-1 / queries with any hit
  std::map<int, double> recall_at_k;
  double recall_at_1 = 0.0;
  double f_score = 0.0;  // harmonic mean of precision_at_1 and recall_at_1
  double mrr = 0.0;      // mean of 1/K, 0 when the truth is not retrieved
  int queries = 0;
  int declared = 0;
};

// Throws std::invalid_argument for an unknown truth id or a k < 1.
RetrievalMetrics Evaluate(const InvertedIndex& index, std::span<const EvalQuery> queries,
                          std::span<const int> ks, const QueryOptions& options = {});

// Reciprocal rank of `truth_id` in `hits`, 0 when absent.
double ReciprocalRank(std::span<const RankedHit> hits, std::string_view truth_id);

// JSON lines: {"id", "title", "meta": [...], "location"} per record and
// {"keywords": "..." | [...], "truth": "..."} per query.
std::vector<BookRecord> ReadBooksJsonl(std::istream& in);
void WriteBooksJsonl(std::ostream& out, std::span<const BookRecord> records);
std::vector<EvalQuery> ReadQueriesJsonl(std::istream& in);
void WriteQueriesJsonl(std::ostream& out, std::span<const EvalQuery> queries);
std::string MetricsToJson(const RetrievalMetrics& m);
std::string HitsToJson(std::span<const RankedHit> hits);

}  // namespace shelfread

#endif  // SHELFREAD_RETRIEVAL_H_
