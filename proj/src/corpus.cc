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

#include "menta/corpus.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "menta/error.h"
#include "menta/io.h"
#include "menta/rng.h"
#include "menta/text.h"

namespace menta {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string IdFromJson(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<int64_t>());
  throw InvalidArgument("doc_id must be a string");
}

// Pseudo-word generator for the synthetic corpus. Every word it hands out is
// unique for the lifetime of the generator.
class WordSource {
 public:
  explicit WordSource(uint64_t seed) : rng_(seed) {}

  std::string Word(size_t length) {
    static constexpr std::string_view kLetters = "abcdefghijklmnopqrstuvwxyz";
    return Draw(length, kLetters);
  }

  std::string FactToken() {
    static constexpr std::string_view kAlnum =
        "abcdefghijklmnopqrstuvwxyz0123456789";
    return Draw(8, kAlnum);
  }

 private:
  std::string Draw(size_t length, std::string_view alphabet) {
    for (;;) {
      std::string w(length, ' ');
      for (auto& c : w) c = alphabet[rng_.UniformInt(alphabet.size())];
      if (text::IsStopword(w)) continue;
      if (used_.insert(w).second) return w;
    }
  }

  Rng rng_;
  std::unordered_set<std::string> used_;
};

struct Topic {
  std::vector<std::string> words;
};

}  // namespace

std::string_view MembershipName(Membership m) {
  return m == Membership::kMember ? "member" : "non_member";
}

Membership ParseMembership(std::string_view name) {
  if (name == "member") return Membership::kMember;
  if (name == "non_member") return Membership::kNonMember;
  throw InvalidArgument("unknown membership label '" + std::string(name) + "'");
}

std::vector<Document> ParseCorpus(std::istream& in) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::Trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kParse, where + ": " + e.what());
    }
    if (!obj.is_object()) {
      throw Error(ErrorCode::kParse, where + ": expected a JSON object");
    }
    Document doc;
    try {
      if (obj.contains("doc_id")) {
        doc.doc_id = IdFromJson(obj["doc_id"]);
      } else if (obj.contains("_id")) {
        doc.doc_id = IdFromJson(obj["_id"]);
      } else {
        throw InvalidArgument("missing doc_id/_id");
      }
      if (obj.contains("title") && !obj["title"].is_null()) {
        doc.title = obj["title"].get<std::string>();
      }
      if (!obj.contains("text") || !obj["text"].is_string()) {
        throw InvalidArgument("missing text");
      }
      doc.text = obj["text"].get<std::string>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, where + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse, where + ": " + e.what());
    }
    if (doc.doc_id.empty()) {
      throw Error(ErrorCode::kParse, where + ": empty doc_id");
    }
    if (doc.text.empty()) {
      throw Error(ErrorCode::kParse, where + ": empty text");
    }
    if (!seen.insert(doc.doc_id).second) {
      throw Error(ErrorCode::kDuplicateId,
                  where + ": duplicate doc_id '" + doc.doc_id + "'");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> LoadCorpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kParse, "cannot open corpus " + path.string());
  }
  return ParseCorpus(in);
}

void WriteCorpus(std::ostream& out, const std::vector<Document>& docs) {
  for (const auto& d : docs) {
    ordered_json j;
    j["doc_id"] = d.doc_id;
    j["title"] = d.title;
    j["text"] = d.text;
    out << j.dump() << '\n';
  }
}

void SaveCorpus(const std::filesystem::path& path,
                const std::vector<Document>& docs) {
  std::ostringstream out;
  WriteCorpus(out, docs);
  io::WriteFileAtomic(path, out.str());
}

CorpusSplit MakeSplit(const std::vector<Document>& docs, size_t n_members,
                      size_t n_non_members, uint64_t seed,
                      double calibration_fraction) {
  if (n_members + n_non_members > docs.size()) {
    throw Error(ErrorCode::kInsufficientData,
                "split needs " + std::to_string(n_members + n_non_members) +
                    " documents, corpus has " + std::to_string(docs.size()));
  }
  if (!(calibration_fraction > 0.0 && calibration_fraction < 1.0)) {
    throw InvalidArgument("calibration_fraction must lie in (0, 1)");
  }
  std::vector<size_t> order(docs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(DeriveSeed(seed, "split"));
  rng.Shuffle(order);
  std::vector<size_t> members(order.begin(), order.begin() + n_members);
  std::vector<size_t> non_members(order.begin() + n_members,
                                  order.begin() + n_members + n_non_members);
  std::sort(members.begin(), members.end());
  std::sort(non_members.begin(), non_members.end());

  CorpusSplit split;
  split.seed = seed;
  split.calibration_fraction = calibration_fraction;
  for (size_t i : members) split.members.push_back(docs[i].doc_id);
  for (size_t i : non_members) split.non_members.push_back(docs[i].doc_id);
  return split;
}

std::vector<Document> ApplySplit(const std::vector<Document>& docs,
                                 const CorpusSplit& split) {
  std::unordered_set<std::string> members(split.members.begin(),
                                          split.members.end());
  std::unordered_set<std::string> non_members(split.non_members.begin(),
                                              split.non_members.end());
  for (const auto& id : members) {
    if (non_members.contains(id)) {
      throw InvalidArgument("doc_id '" + id + "' is both member and non-member");
    }
  }
  std::vector<Document> out;
  size_t found = 0;
  for (const auto& d : docs) {
    if (members.contains(d.doc_id)) {
      out.push_back(d);
      out.back().membership = Membership::kMember;
      ++found;
    } else if (non_members.contains(d.doc_id)) {
      out.push_back(d);
      out.back().membership = Membership::kNonMember;
      ++found;
    }
  }
  if (found != members.size() + non_members.size()) {
    throw InvalidArgument("split references doc_ids missing from the corpus");
  }
  return out;
}

std::vector<Document> MemberDocuments(const std::vector<Document>& docs,
                                      const CorpusSplit& split) {
  std::unordered_set<std::string> members(split.members.begin(),
                                          split.members.end());
  std::vector<Document> out;
  for (const auto& d : docs) {
    if (members.contains(d.doc_id)) out.push_back(d);
  }
  return out;
}

json SplitToJson(const CorpusSplit& split) {
  ordered_json j;
  j["members"] = split.members;
  j["non_members"] = split.non_members;
  j["seed"] = split.seed;
  j["calibration_fraction"] = split.calibration_fraction;
  return json(j);
}

CorpusSplit SplitFromJson(const json& j) {
  CorpusSplit split;
  try {
    split.members = j.at("members").get<std::vector<std::string>>();
    split.non_members = j.at("non_members").get<std::vector<std::string>>();
    split.seed = j.value("seed", uint64_t{0});
    split.calibration_fraction = j.value("calibration_fraction", 0.3);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("split file: ") + e.what());
  }
  return split;
}

void SaveSplit(const std::filesystem::path& path, const CorpusSplit& split) {
  ordered_json j;
  j["members"] = split.members;
  j["non_members"] = split.non_members;
  j["seed"] = split.seed;
  j["calibration_fraction"] = split.calibration_fraction;
  io::WriteFileAtomic(path, j.dump(2) + "\n");
}

CorpusSplit LoadSplit(const std::filesystem::path& path) {
  return SplitFromJson(io::ReadJsonFile(path));
}

SyntheticCorpus SynthCorpus(size_t n_members, size_t n_non_members,
                            size_t facts_per_doc, uint64_t seed) {
  if (n_members + n_non_members == 0 || facts_per_doc == 0) {
    throw InvalidArgument("synthetic corpus needs at least one document and "
                          "one fact per document");
  }
  WordSource words(DeriveSeed(seed, "corpus.words"));
  constexpr size_t kTopicWords = 3;
  constexpr size_t kAttributes = 4;

  auto make_topic = [&] {
    Topic t;
    for (size_t i = 0; i < kTopicWords; ++i) t.words.push_back(words.Word(7));
    return t;
  };
  std::vector<Topic> member_topics;
  for (size_t i = 0; i < n_members; ++i) member_topics.push_back(make_topic());

  SyntheticCorpus out;
  struct Pending {
    Document doc;
    std::vector<std::string> tokens;
  };
  std::vector<Pending> pending;
  auto make_doc = [&](const Topic& topic, Membership m) {
    Pending p;
    p.doc.membership = m;
    p.doc.title = text::Join(topic.words, " ") + " notes";
    std::vector<std::string> sentences;
    for (size_t k = 0; k < facts_per_doc; ++k) {
      std::string token = words.FactToken();
      std::vector<std::string> attr;
      for (size_t a = 0; a < kAttributes; ++a) attr.push_back(words.Word(6));
      sentences.push_back("The " + topic.words[k % kTopicWords] + " " + token +
                          " of " + attr[0] + " is " + attr[1] + " with " +
                          attr[2] + " and " + attr[3] + ".");
      p.tokens.push_back(std::move(token));
    }
    p.doc.text = text::Join(sentences, " ");
    pending.push_back(std::move(p));
  };
  for (size_t i = 0; i < n_members; ++i) {
    make_doc(member_topics[i], Membership::kMember);
  }
  for (size_t j = 0; j < n_non_members; ++j) {
    make_doc(n_members > 0 ? member_topics[j % n_members] : make_topic(),
             Membership::kNonMember);
  }

  // Ids are assigned after a shuffle so they carry no membership signal.
  Rng rng(DeriveSeed(seed, "corpus.order"));
  rng.Shuffle(pending);
  char id[32];
  for (size_t i = 0; i < pending.size(); ++i) {
    std::snprintf(id, sizeof(id), "syn-%04zu", i);
    auto& p = pending[i];
    p.doc.doc_id = id;
    for (const auto& tok : p.tokens) out.fact_owner.emplace(tok, p.doc.doc_id);
    if (p.doc.membership == Membership::kMember) {
      out.split.members.push_back(p.doc.doc_id);
    } else {
      out.split.non_members.push_back(p.doc.doc_id);
    }
    out.docs.push_back(std::move(p.doc));
  }
  out.split.seed = seed;
  return out;
}

BenignQuerySet SynthBenignQueries(const std::vector<Document>& docs, size_t n,
                                  uint64_t seed) {
  if (docs.empty() || n == 0) {
    throw InvalidArgument("benign query synthesis needs documents and n >= 1");
  }
  static constexpr std::string_view kForms[] = {
      "What is known about %s and %s?",
      "Give an overview of %s research in relation to %s.",
      "How are %s and %s usually discussed?",
      "Summarize recent findings on %s for %s.",
  };
  Rng rng(DeriveSeed(seed, "benign"));
  BenignQuerySet set;
  set.source = "synthetic";
  for (size_t i = 0; i < n; ++i) {
    const auto& doc = docs[rng.UniformInt(docs.size())];
    auto title_words = text::ContentTokens(doc.title);
    if (title_words.empty()) title_words = text::ContentTokens(doc.text);
    const std::string& a = title_words[rng.UniformInt(title_words.size())];
    const std::string& b = title_words[rng.UniformInt(title_words.size())];
    const auto form = kForms[rng.UniformInt(std::size(kForms))];
    char buf[256];
    std::snprintf(buf, sizeof(buf), std::string(form).c_str(), a.c_str(),
                  b.c_str());
    set.queries.emplace_back(buf);
  }
  return set;
}

BenignQuerySet LoadBenignQueries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kParse, "cannot open benign query set " +
                                       path.string());
  }
  BenignQuerySet set;
  set.source = path.filename().string();
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::Trim(line).empty()) continue;
    std::string query;
    try {
      auto j = json::parse(line);
      if (j.is_string()) {
        query = j.get<std::string>();
      } else {
        query = j.at("query").get<std::string>();
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (text::Trim(query).empty()) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + ": empty query");
    }
    set.queries.push_back(std::move(query));
  }
  if (set.queries.empty()) {
    throw InvalidArgument("benign query set " + path.string() + " is empty");
  }
  return set;
}

}  // namespace menta
