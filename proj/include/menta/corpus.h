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

// Document corpora, member/non-member splits and benign query sets.
//
// Membership labels never live in the corpus file. They are attached from a
// sidecar split so that nothing on the retrieval or prompting path can read
// them by accident.

#ifndef MENTA_CORPUS_H_
#define MENTA_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

namespace menta {

enum class Membership { kMember, kNonMember };

std::string_view MembershipName(Membership m);
Membership ParseMembership(std::string_view name);

struct Document {
  std::string doc_id;
  std::string title;
  std::string text;
  Membership membership = Membership::kNonMember;
};

struct CorpusSplit {
  std::vector<std::string> members;
  std::vector<std::string> non_members;
  uint64_t seed = 0;
  double calibration_fraction = 0.3;
};

struct BenignQuerySet {
  std::vector<std::string> queries;
  std::string source;
};

// Reads JSON Lines with keys doc_id (or BEIR's _id), title, text. Blank lines
// are skipped. Errors name the 1-based line number.
std::vector<Document> LoadCorpus(const std::filesystem::path& path);
std::vector<Document> ParseCorpus(std::istream& in);

// One line per document, keys in the order doc_id, title, text.
void WriteCorpus(std::ostream& out, const std::vector<Document>& docs);
void SaveCorpus(const std::filesystem::path& path,
                const std::vector<Document>& docs);

// Seeded, disjoint selection of members and non-members from `docs`. Both id
// lists keep the corpus order of the selected documents.
CorpusSplit MakeSplit(const std::vector<Document>& docs, size_t n_members,
                      size_t n_non_members, uint64_t seed,
                      double calibration_fraction = 0.3);

// Stamps membership labels from `split` onto a copy of `docs`, dropping
// documents that are in neither list.
std::vector<Document> ApplySplit(const std::vector<Document>& docs,
                                 const CorpusSplit& split);

// The subset that goes into the retrieval index.
std::vector<Document> MemberDocuments(const std::vector<Document>& docs,
                                      const CorpusSplit& split);

nlohmann::json SplitToJson(const CorpusSplit& split);
CorpusSplit SplitFromJson(const nlohmann::json& j);
void SaveSplit(const std::filesystem::path& path, const CorpusSplit& split);
CorpusSplit LoadSplit(const std::filesystem::path& path);

struct SyntheticCorpus {
  std::vector<Document> docs;
  CorpusSplit split;
  // fact token -> owning doc_id, for oracle checks and diagnostics.
  std::unordered_map<std::string, std::string> fact_owner;
};

// Desk-scale fixture. Every document gets `facts_per_doc` sentences, each
// carrying a unique 8-character [a-z0-9] fact token plus unique attribute
// words. Non-member j shares the topic vocabulary of member j mod n_members
// but never a fact token or attribute word.
SyntheticCorpus SynthCorpus(size_t n_members, size_t n_non_members,
                            size_t facts_per_doc, uint64_t seed);

// Topical questions over the corpus vocabulary that do not target any single
// fact; stands in for a public benign query log.
BenignQuerySet SynthBenignQueries(const std::vector<Document>& docs, size_t n,
                                  uint64_t seed);

// JSONL, either {"query": ...} objects or bare strings per line.
BenignQuerySet LoadBenignQueries(const std::filesystem::path& path);

}  // namespace menta

#endif  // MENTA_CORPUS_H_
