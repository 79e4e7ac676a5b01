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

#include "menta/retrieval.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "menta/error.h"
#include "menta/io.h"
#include "menta/text.h"

namespace menta {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view RetrieverKindName(RetrieverKind kind) {
  return kind == RetrieverKind::kDense ? "dense" : "bm25";
}

RetrieverKind ParseRetrieverKind(std::string_view name) {
  if (name == "dense") return RetrieverKind::kDense;
  if (name == "bm25") return RetrieverKind::kBm25;
  throw InvalidArgument("unknown retriever '" + std::string(name) + "'");
}

double Bm25Idf(size_t doc_count, int doc_freq) {
  const double n = static_cast<double>(doc_count);
  const double df = static_cast<double>(doc_freq);
  return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

std::string RetrievalIndex::IndexText(const Document& doc) {
  return doc.title.empty() ? doc.text : doc.title + "\n" + doc.text;
}

RetrievalIndex RetrievalIndex::Build(const std::vector<Document>& docs,
                                     RetrieverKind kind,
                                     std::shared_ptr<const EmbedBackend> embed) {
  if (docs.empty()) throw InvalidArgument("cannot index an empty corpus");
  if (kind == RetrieverKind::kDense && !embed) {
    throw Error(ErrorCode::kConfiguration,
                "dense retrieval requires an embedding backend");
  }
  RetrievalIndex index(kind, std::move(embed));
  index.entries_.reserve(docs.size());
  for (const auto& doc : docs) {
    if (index.by_id_.contains(doc.doc_id)) {
      throw Error(ErrorCode::kDuplicateId,
                  "duplicate doc_id '" + doc.doc_id + "' in index");
    }
    Entry entry;
    entry.doc = doc;
    if (kind == RetrieverKind::kDense) {
      try {
        entry.vector = index.embed_->Embed(IndexText(doc));
      } catch (const Error& e) {
        throw Error(ErrorCode::kIndexing,
                    "embedding doc '" + doc.doc_id + "' failed: " + e.what());
      }
    } else {
      for (auto& tok : text::Tokenize(IndexText(doc))) {
        ++entry.tf[tok];
        ++entry.length;
      }
    }
    index.by_id_.emplace(doc.doc_id, index.entries_.size());
    index.entries_.push_back(std::move(entry));
  }
  index.FinishBm25Stats();
  return index;
}

void RetrievalIndex::FinishBm25Stats() {
  stats_ = Stats{};
  stats_.doc_count = entries_.size();
  if (kind_ != RetrieverKind::kBm25) return;
  long total = 0;
  for (const auto& e : entries_) {
    total += e.length;
    for (const auto& [term, count] : e.tf) ++stats_.doc_freq[term];
  }
  stats_.avg_doc_length =
      entries_.empty() ? 0.0
                       : static_cast<double>(total) /
                             static_cast<double>(entries_.size());
}

double RetrievalIndex::Bm25Score(const std::vector<std::string>& query_tokens,
                                 const Entry& entry) const {
  double score = 0.0;
  const double norm =
      bm25_.k1 * (1.0 - bm25_.b +
                  bm25_.b * static_cast<double>(entry.length) /
                      stats_.avg_doc_length);
  for (const auto& tok : query_tokens) {
    auto it = entry.tf.find(tok);
    if (it == entry.tf.end()) continue;
    const double tf = it->second;
    const double idf = Bm25Idf(stats_.doc_count, stats_.doc_freq.at(tok));
    score += idf * tf * (bm25_.k1 + 1.0) / (tf + norm);
  }
  return score;
}

std::vector<double> RetrievalIndex::CosineAll(
    const EmbeddingVector& query) const {
  if (kind_ != RetrieverKind::kDense) {
    throw Error(ErrorCode::kConfiguration, "index has no dense vectors");
  }
  std::vector<double> scores;
  scores.reserve(entries_.size());
  for (const auto& e : entries_) scores.push_back(Cosine(query, e.vector));
  return scores;
}

std::vector<double> RetrievalIndex::ScoreAll(std::string_view query) const {
  if (text::Trim(query).empty()) throw InvalidArgument("query is empty");
  if (kind_ == RetrieverKind::kDense) return CosineAll(embed_->Embed(query));
  const auto tokens = text::Tokenize(query);
  std::vector<double> scores;
  scores.reserve(entries_.size());
  for (const auto& e : entries_) scores.push_back(Bm25Score(tokens, e));
  return scores;
}

std::vector<RetrievedContext> RetrievalIndex::Retrieve(std::string_view query,
                                                       size_t k) const {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  const auto scores = ScoreAll(query);
  std::vector<size_t> order(entries_.size());
  std::iota(order.begin(), order.end(), 0);
  const size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + take, order.end(),
                    [&](size_t a, size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return entries_[a].doc.doc_id < entries_[b].doc.doc_id;
                    });
  std::vector<RetrievedContext> out;
  out.reserve(take);
  for (size_t r = 0; r < take; ++r) {
    out.push_back({entries_[order[r]].doc.doc_id, scores[order[r]], r + 1});
  }
  return out;
}

const Document* RetrievalIndex::Find(std::string_view doc_id) const {
  auto it = by_id_.find(std::string(doc_id));
  return it == by_id_.end() ? nullptr : &entries_[it->second].doc;
}

void RetrievalIndex::SaveCache(const std::filesystem::path& path) const {
  std::ostringstream out;
  for (const auto& e : entries_) {
    ordered_json j;
    j["doc_id"] = e.doc.doc_id;
    if (kind_ == RetrieverKind::kDense) {
      j["vector"] = e.vector.values;
    } else {
      ordered_json tf = ordered_json::object();
      for (const auto& [term, count] : e.tf) tf[term] = count;
      j["tf"] = std::move(tf);
    }
    out << j.dump() << '\n';
  }
  io::WriteFileAtomic(path, out.str());
}

RetrievalIndex RetrievalIndex::LoadCache(
    const std::filesystem::path& path, const std::vector<Document>& docs,
    RetrieverKind kind, std::shared_ptr<const EmbedBackend> embed) {
  if (kind == RetrieverKind::kDense && !embed) {
    throw Error(ErrorCode::kConfiguration,
                "dense retrieval requires an embedding backend");
  }
  std::unordered_map<std::string, const Document*> docs_by_id;
  for (const auto& d : docs) docs_by_id.emplace(d.doc_id, &d);

  RetrievalIndex index(kind, std::move(embed));
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open index cache " + path.string());
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::Trim(line).empty()) continue;
    const std::string where =
        path.string() + " line " + std::to_string(line_no);
    try {
      const json j = json::parse(line);
      const auto id = j.at("doc_id").get<std::string>();
      auto it = docs_by_id.find(id);
      if (it == docs_by_id.end()) {
        throw InvalidArgument(where + ": doc_id '" + id +
                              "' is not in the member set");
      }
      if (index.by_id_.contains(id)) {
        throw Error(ErrorCode::kDuplicateId, where + ": duplicate doc_id");
      }
      Entry entry;
      entry.doc = *it->second;
      if (kind == RetrieverKind::kDense) {
        entry.vector.values = j.at("vector").get<std::vector<double>>();
      } else {
        for (const auto& [term, count] : j.at("tf").items()) {
          entry.tf[term] = count.get<int>();
          entry.length += count.get<int>();
        }
      }
      index.by_id_.emplace(id, index.entries_.size());
      index.entries_.push_back(std::move(entry));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, where + ": " + e.what());
    }
  }
  if (index.entries_.size() != docs.size()) {
    throw InvalidArgument("index cache holds " +
                          std::to_string(index.entries_.size()) +
                          " entries but the member set has " +
                          std::to_string(docs.size()));
  }
  if (index.entries_.empty()) throw InvalidArgument("index cache is empty");
  index.FinishBm25Stats();
  return index;
}

}  // namespace menta
