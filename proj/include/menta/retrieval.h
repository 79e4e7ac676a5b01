// Copyright 2026 The MEntA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exhaustive top-k retrieval over the member documents, either dense (cosine
// over an EmbedBackend) or lexical Okapi BM25. Indices are immutable after
// construction and safe to query concurrently.

#ifndef MENTA_RETRIEVAL_H_
#define MENTA_RETRIEVAL_H_

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "menta/backends.h"
#include "menta/corpus.h"

namespace menta {

enum class RetrieverKind { kDense, kBm25 };

std::string_view RetrieverKindName(RetrieverKind kind);
RetrieverKind ParseRetrieverKind(std::string_view name);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct RetrievedContext {
  std::string doc_id;
  double score = 0.0;
  size_t rank = 0;  // 1-based
};

// Term frequencies of one document; std::map keeps serialization ordered.
using TermFreqs = std::map<std::string, int, std::less<>>;

class RetrievalIndex {
 public:
  struct Entry {
    Document doc;
    EmbeddingVector vector;  // dense only
    TermFreqs tf;            // bm25 only
    int length = 0;          // bm25 token count
  };

  struct Stats {
    size_t doc_count = 0;
    double avg_doc_length = 0.0;
    std::unordered_map<std::string, int> doc_freq;
  };

  // Every document is embedded or tokenized exactly once. Dense indices keep
  // `embed` to encode queries.
  static RetrievalIndex Build(const std::vector<Document>& docs,
                              RetrieverKind kind,
                              std::shared_ptr<const EmbedBackend> embed = {});

  // Rebuilds an index from a cache file written by SaveCache() and the same
  // documents. Retrieval results are bit-identical to the original index.
  static RetrievalIndex LoadCache(const std::filesystem::path& path,
                                  const std::vector<Document>& docs,
                                  RetrieverKind kind,
                                  std::shared_ptr<const EmbedBackend> embed = {});
  void SaveCache(const std::filesystem::path& path) const;

  // min(k, size()) results ordered by score descending, ties by ascending
  // doc_id.
  std::vector<RetrievedContext> Retrieve(std::string_view query,
                                         size_t k) const;

  // Score of `query` against every entry, in entry order.
  std::vector<double> ScoreAll(std::string_view query) const;

  // Dense similarity of an already-embedded query against every entry.
  std::vector<double> CosineAll(const EmbeddingVector& query) const;

  RetrieverKind kind() const { return kind_; }
  size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }
  const Stats& stats() const { return stats_; }
  const Bm25Params& bm25_params() const { return bm25_; }
  const Document* Find(std::string_view doc_id) const;
  bool Contains(std::string_view doc_id) const { return Find(doc_id) != nullptr; }
  const std::shared_ptr<const EmbedBackend>& embed_backend() const {
    return embed_;
  }

  // Text that gets embedded or tokenized for a document: title and body.
  static std::string IndexText(const Document& doc);

 private:
  RetrievalIndex(RetrieverKind kind, std::shared_ptr<const EmbedBackend> embed)
      : kind_(kind), embed_(std::move(embed)) {}
  void FinishBm25Stats();
  double Bm25Score(const std::vector<std::string>& query_tokens,
                   const Entry& entry) const;

  RetrieverKind kind_;
  std::shared_ptr<const EmbedBackend> embed_;
  Bm25Params bm25_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, size_t> by_id_;
  Stats stats_;
};

// Okapi BM25 IDF with the +1 smoothing that keeps every weight positive:
// ln((N - df + 0.5) / (df + 0.5) + 1).
double Bm25Idf(size_t doc_count, int doc_freq);

}  // namespace menta

#endif  // MENTA_RETRIEVAL_H_
