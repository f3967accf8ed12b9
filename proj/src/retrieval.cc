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

#include "shelfread/retrieval.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "shelfread/editdist.h"
#include "shelfread/utf8.h"

namespace shelfread {
namespace {

using nlohmann::json;

constexpr char kIndexMagic[4] = {'S', 'R', 'I', 'X'};
constexpr uint32_t kIndexVersion = 1;

std::u32string LowerCodePoints(std::string_view text) {
  std::u32string cps = utf8::Decode(text);
  for (char32_t& c : cps) c = utf8::ToLower(c);
  return cps;
}

std::string JoinIds(const std::vector<std::string>& ids) {
  std::string out;
  for (const std::string& id : ids) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

void WriteString(std::ostream& out, const std::string& s) {
  const uint64_t n = s.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string ReadString(std::istream& in) {
  uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || n > (uint64_t{1} << 32)) throw std::runtime_error("index file is truncated");
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("index file is truncated");
  return s;
}

template <typename T>
void WritePod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T ReadPod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("index file is truncated");
  return v;
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::u32string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(utf8::Encode(current));
    current.clear();
  };
  for (char32_t c : utf8::Decode(text)) {
    if (utf8::IsAlnum(c)) {
      current.push_back(utf8::ToLower(c));
    } else if (utf8::IsSpace(c)) {
      flush();
    }
  }
  flush();
  return tokens;
}

DuplicateIdError::DuplicateIdError(std::vector<std::string> ids)
    : std::invalid_argument("duplicate book ids: " + JoinIds(ids)), ids_(std::move(ids)) {}

InvertedIndex InvertedIndex::Build(std::vector<BookRecord> records) {
  InvertedIndex idx;
  std::vector<std::string> duplicates;
  for (size_t d = 0; d < records.size(); ++d) {
    if (!idx.doc_ids_.emplace(records[d].id, static_cast<int>(d)).second) {
      duplicates.push_back(records[d].id);
    }
  }
  if (!duplicates.empty()) {
    std::sort(duplicates.begin(), duplicates.end());
    duplicates.erase(std::unique(duplicates.begin(), duplicates.end()), duplicates.end());
    throw DuplicateIdError(std::move(duplicates));
  }
  for (const BookRecord& r : records) {
    if (r.title.empty()) throw std::invalid_argument("book " + r.id + " has an empty title");
  }

  std::vector<std::map<std::string, int>> counts(records.size());
  std::map<std::string, int> vocab;
  for (size_t d = 0; d < records.size(); ++d) {
    auto add = [&](const std::string& field) {
      for (std::string& t : Tokenize(field)) {
        ++counts[d][t];
        vocab.emplace(std::move(t), 0);
      }
    };
    add(records[d].title);
    for (const std::string& m : records[d].meta) add(m);
  }

  int next = 0;
  for (auto& [term, id] : vocab) {
    id = next++;
    idx.vocabulary_.push_back(term);
    idx.vocab_u32_.push_back(utf8::Decode(term));
    idx.term_ids_.emplace(term, id);
  }
  idx.postings_.resize(vocab.size());
  idx.collection_freq_.assign(vocab.size(), 0);
  idx.doc_terms_.resize(records.size());
  for (size_t d = 0; d < records.size(); ++d) {
    for (const auto& [term, tf] : counts[d]) {
      const int t = vocab.at(term);
      idx.postings_[t].push_back({static_cast<int>(d), tf});
      idx.collection_freq_[t] += tf;
      idx.doc_terms_[d].emplace_back(t, tf);
    }
  }

  const double n = static_cast<double>(records.size());
  idx.idf_.resize(vocab.size());
  for (size_t t = 0; t < vocab.size(); ++t) {
    idx.idf_[t] = std::log(n / static_cast<double>(idx.postings_[t].size()));
  }
  idx.doc_norm_.resize(records.size());
  for (size_t d = 0; d < records.size(); ++d) {
    double sq = 0.0;
    for (const auto& [t, tf] : idx.doc_terms_[d]) {
      const double w = tf * idx.idf_[t];
      sq += w * w;
    }
    idx.doc_norm_[d] = std::sqrt(sq);
  }
  idx.records_ = std::move(records);
  return idx;
}

std::optional<int> InvertedIndex::FindDocument(std::string_view id) const {
  auto it = doc_ids_.find(std::string(id));
  if (it == doc_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> InvertedIndex::TermId(std::string_view term) const {
  auto it = term_ids_.find(std::string(term));
  if (it == term_ids_.end()) return std::nullopt;
  return it->second;
}

void InvertedIndex::Save(std::ostream& out) const {
  out.write(kIndexMagic, sizeof kIndexMagic);
  WritePod<uint32_t>(out, kIndexVersion);
  WritePod<uint64_t>(out, records_.size());
  for (const BookRecord& r : records_) {
    WriteString(out, r.id);
    WriteString(out, r.title);
    WritePod<uint64_t>(out, r.meta.size());
    for (const std::string& m : r.meta) WriteString(out, m);
    WritePod<uint8_t>(out, r.location.has_value());
    if (r.location) WriteString(out, *r.location);
  }
  if (!out) throw std::runtime_error("failed to write index");
}

InvertedIndex InvertedIndex::Load(std::istream& in) {
  char magic[4] = {};
  in.read(magic, sizeof magic);
  if (!in || !std::equal(magic, magic + 4, kIndexMagic)) {
    throw std::runtime_error("not a shelfread index file");
  }
  const auto version = ReadPod<uint32_t>(in);
  if (version != kIndexVersion) {
    throw std::runtime_error("unsupported index version " + std::to_string(version));
  }
  const auto n = ReadPod<uint64_t>(in);
  std::vector<BookRecord> records;
  for (uint64_t i = 0; i < n; ++i) {
    BookRecord r;
    r.id = ReadString(in);
    r.title = ReadString(in);
    const auto m = ReadPod<uint64_t>(in);
    for (uint64_t j = 0; j < m; ++j) r.meta.push_back(ReadString(in));
    if (ReadPod<uint8_t>(in)) r.location = ReadString(in);
    records.push_back(std::move(r));
  }
  return Build(std::move(records));
}

std::string DictionaryCorrect(std::string_view token, const InvertedIndex& index,
                              int max_distance) {
  const std::u32string query = LowerCodePoints(token);
  if (auto exact = index.TermId(utf8::Encode(query))) return index.vocabulary()[*exact];

  int best = -1;
  int best_distance = std::numeric_limits<int>::max();
  const auto qlen = static_cast<long>(query.size());
  for (int t = 0; t < static_cast<int>(index.vocabulary().size()); ++t) {
    const std::u32string& cand = index.TermCodePoints(t);
    // Length difference is a lower bound on the distance.
    if (std::abs(static_cast<long>(cand.size()) - qlen) > max_distance) continue;
    const int d = EditDistance(query, cand);
    if (d > max_distance) continue;
    // Vocabulary is sorted, so keeping the earlier term on equal frequency
    // gives the lexicographic tie-break.
    if (d < best_distance ||
        (d == best_distance && index.CollectionFrequency(t) > index.CollectionFrequency(best))) {
      best = t;
      best_distance = d;
    }
  }
  if (best < 0) return std::string(token);
  return index.vocabulary()[best];
}

std::vector<RankedHit> RankTerms(const InvertedIndex& index, std::span<const std::string> terms,
                                 int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::map<int, int> qtf;
  for (const std::string& term : terms) {
    if (auto t = index.TermId(term)) ++qtf[*t];
  }
  double qsq = 0.0;
  for (const auto& [t, tf] : qtf) {
    const double w = tf * index.Idf(t);
    qsq += w * w;
  }
  const double qnorm = std::sqrt(qsq);
  if (qnorm == 0.0) return {};

  std::vector<double> dot(index.doc_count(), 0.0);
  for (const auto& [t, tf] : qtf) {
    const double qw = tf * index.Idf(t);
    for (const InvertedIndex::Posting& p : index.postings(t)) dot[p.doc] += qw * (p.tf * index.Idf(t));
  }

  std::vector<RankedHit> hits;
  for (int d = 0; d < index.doc_count(); ++d) {
    if (dot[d] <= 0.0 || index.DocumentNorm(d) == 0.0) continue;
    hits.push_back({index.records()[d].id, dot[d] / (qnorm * index.DocumentNorm(d)), 0});
  }
  auto better = [](const RankedHit& a, const RankedHit& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  };
  if (static_cast<int>(hits.size()) > k) {
    std::partial_sort(hits.begin(), hits.begin() + k, hits.end(), better);
    hits.resize(k);
  } else {
    std::sort(hits.begin(), hits.end(), better);
  }
  for (size_t i = 0; i < hits.size(); ++i) hits[i].rank = static_cast<int>(i) + 1;
  return hits;
}

std::vector<RankedHit> Query(const InvertedIndex& index, std::span<const std::string> keywords,
                             int k, const QueryOptions& options) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::vector<std::string> terms;
  for (const std::string& kw : keywords) {
    for (std::string& tok : Tokenize(kw)) {
      terms.push_back(options.correct ? DictionaryCorrect(tok, index, options.max_distance)
                                      : std::move(tok));
    }
  }
  return RankTerms(index, terms, k);
}

double ReciprocalRank(std::span<const RankedHit> hits, std::string_view truth_id) {
  for (const RankedHit& h : hits) {
    if (h.id == truth_id) return 1.0 / h.rank;
  }
  return 0.0;
}

RetrievalMetrics Evaluate(const InvertedIndex& index, std::span<const EvalQuery> queries,
                          std::span<const int> ks, const QueryOptions& options) {
  for (int k : ks) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
  }
  for (const EvalQuery& q : queries) {
    if (!index.FindDocument(q.truth_id)) {
      throw std::invalid_argument("unknown truth id: " + q.truth_id);
    }
  }

  RetrievalMetrics m;
  m.queries = static_cast<int>(queries.size());
  std::map<int, int> within;
  for (int k : ks) within[k] = 0;
  int correct = 0;
  double rr_sum = 0.0;
  const int depth = std::max(1, index.doc_count());
  for (const EvalQuery& q : queries) {
    const std::vector<RankedHit> hits = Query(index, q.keywords, depth, options);
    if (!hits.empty()) {
      ++m.declared;
      if (hits.front().id == q.truth_id) ++correct;
    }
    rr_sum += ReciprocalRank(hits, q.truth_id);
    for (const RankedHit& h : hits) {
      if (h.id != q.truth_id) continue;
      for (auto& [k, count] : within) count += h.rank <= k;
      break;
    }
  }
  if (m.queries > 0) {
    m.recall_at_1 = static_cast<double>(correct) / m.queries;
    m.mrr = rr_sum / m.queries;
    for (const auto& [k, count] : within) m.recall_at_k[k] = static_cast<double>(count) / m.queries;
  } else {
    for (const auto& [k, count] : within) m.recall_at_k[k] = 0.0;
  }
  if (m.declared > 0) m.precision_at_1 = static_cast<double>(correct) / m.declared;
  const double ps = m.precision_at_1 + m.recall_at_1;
  m.f_score = ps > 0.0 ? 2.0 * m.precision_at_1 * m.recall_at_1 / ps : 0.0;
  return m;
}

std::vector<BookRecord> ReadBooksJsonl(std::istream& in) {
  std::vector<BookRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      BookRecord r;
      r.id = j.at("id").get<std::string>();
      r.title = j.at("title").get<std::string>();
      if (j.contains("meta")) r.meta = j.at("meta").get<std::vector<std::string>>();
      if (j.contains("location") && !j.at("location").is_null()) {
        r.location = j.at("location").get<std::string>();
      }
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw std::runtime_error("books line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

void WriteBooksJsonl(std::ostream& out, std::span<const BookRecord> records) {
  for (const BookRecord& r : records) {
    json j = {{"id", r.id}, {"title", r.title}, {"meta", r.meta}};
    j["location"] = r.location ? json(*r.location) : json(nullptr);
    out << j.dump() << '\n';
  }
}

std::vector<EvalQuery> ReadQueriesJsonl(std::istream& in) {
  std::vector<EvalQuery> queries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      EvalQuery q;
      const json& kw = j.at("keywords");
      if (kw.is_string()) {
        q.keywords.push_back(kw.get<std::string>());
      } else {
        q.keywords = kw.get<std::vector<std::string>>();
      }
      q.truth_id = j.at("truth").get<std::string>();
      queries.push_back(std::move(q));
    } catch (const json::exception& e) {
      throw std::runtime_error("queries line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return queries;
}

void WriteQueriesJsonl(std::ostream& out, std::span<const EvalQuery> queries) {
  for (const EvalQuery& q : queries) {
    out << json{{"keywords", q.keywords}, {"truth", q.truth_id}}.dump() << '\n';
  }
}

std::string MetricsToJson(const RetrievalMetrics& m) {
  json recall = json::object();
  for (const auto& [k, v] : m.recall_at_k) recall[std::to_string(k)] = v;
  const json j = {{"precision_at_1", m.precision_at_1},
                  {"recall_at_1", m.recall_at_1},
                  {"recall_at_k", recall},
                  {"f_score", m.f_score},
                  {"mrr", m.mrr},
                  {"queries", m.queries},
                  {"declared", m.declared}};
  return j.dump();
}

std::string HitsToJson(std::span<const RankedHit> hits) {
  json arr = json::array();
  for (const RankedHit& h : hits) arr.push_back({{"id", h.id}, {"score", h.score}, {"rank", h.rank}});
  return arr.dump();
}

}  // namespace shelfread
