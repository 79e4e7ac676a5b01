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

#include "menta/text.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "menta/error.h"

namespace menta::text {
namespace {

bool IsWordByte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

bool IsSpace(unsigned char c) { return std::isspace(c) != 0; }

constexpr std::array<std::string_view, 54> kStopwords = {
    "a",     "about", "an",    "and",   "are",   "as",    "at",   "be",
    "been",  "but",   "by",    "can",   "could", "did",   "do",   "does",
    "for",   "from",  "had",   "has",   "have",  "he",    "her",  "his",
    "how",   "if",    "in",    "into",  "is",    "it",    "its",  "of",
    "on",    "or",    "our",   "she",   "so",    "than",  "that", "the",
    "their", "then",  "there", "these", "they",  "this",  "those", "to",
    "was",   "we",    "were",  "what",  "which", "with",
};

const std::unordered_set<std::string_view>& StopwordSet() {
  static const std::unordered_set<std::string_view> set(kStopwords.begin(),
                                                        kStopwords.end());
  return set;
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2) tokens.push_back(current);
    current.clear();
  };
  for (unsigned char c : text) {
    if (IsWordByte(c)) {
      current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

bool IsStopword(std::string_view token) {
  return StopwordSet().contains(token);
}

std::vector<std::string> ContentTokens(std::string_view text) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (auto& tok : Tokenize(text)) {
    if (IsStopword(tok)) continue;
    if (seen.insert(tok).second) out.push_back(std::move(tok));
  }
  return out;
}

std::set<std::string> ContentTokenSet(std::string_view text) {
  auto tokens = ContentTokens(text);
  return {tokens.begin(), tokens.end()};
}

std::vector<std::string> SplitSentences(std::string_view text) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '?' && c != '!') continue;
    const bool at_end = i + 1 == text.size();
    if (!at_end && !IsSpace(static_cast<unsigned char>(text[i + 1]))) continue;
    std::string piece = Trim(text.substr(start, i + 1 - start));
    if (!piece.empty()) out.push_back(std::move(piece));
    start = i + 1;
  }
  if (start < text.size()) {
    std::string piece = Trim(text.substr(start));
    if (!piece.empty()) out.push_back(std::move(piece));
  }
  return out;
}

std::string Trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && IsSpace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && IsSpace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string ToLower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x80) c = static_cast<char>(std::tolower(u));
  }
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && IsSpace(static_cast<unsigned char>(s[i]))) ++i;
    size_t j = i;
    while (j < s.size() && !IsSpace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string Join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

int EstimateTokens(std::string_view text) {
  return static_cast<int>((text.size() + 3) / 4);
}

std::string TruncateToTokens(std::string_view text, int max_tokens) {
  if (max_tokens < 0) max_tokens = 0;
  const size_t max_chars = static_cast<size_t>(max_tokens) * 4;
  if (text.size() <= max_chars) return std::string(text);
  size_t cut = max_chars;
  // Step back to a UTF-8 lead byte.
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) {
    --cut;
  }
  const size_t space = text.substr(0, cut).find_last_of(" \t\n\r");
  if (space != std::string_view::npos && space > 0) cut = space;
  return Trim(text.substr(0, cut));
}

uint64_t Fnv1a64(std::string_view data) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace menta::text
