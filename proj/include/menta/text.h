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

// Tokenization and sentence utilities shared by the retriever, the mock
// backends and claim splitting.

#ifndef MENTA_TEXT_H_
#define MENTA_TEXT_H_

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace menta::text {

// Lowercases ASCII, splits on non-alphanumeric bytes and drops tokens shorter
// than two characters. Bytes >= 0x80 count as word characters so UTF-8 words
// stay intact.
std::vector<std::string> Tokenize(std::string_view text);

bool IsStopword(std::string_view token);

// Tokenize() minus stopwords, order of first occurrence, duplicates removed.
std::vector<std::string> ContentTokens(std::string_view text);
std::set<std::string> ContentTokenSet(std::string_view text);

// Splits after '.', '?' or '!' when followed by whitespace or end of input.
// Fragments are trimmed; empty fragments are dropped.
std::vector<std::string> SplitSentences(std::string_view text);

std::string Trim(std::string_view s);
std::string ToLower(std::string_view s);
std::vector<std::string> SplitWhitespace(std::string_view s);
std::string Join(const std::vector<std::string>& parts, std::string_view sep);

// Rough token estimate used when a backend reports no usage: ceil(chars / 4).
int EstimateTokens(std::string_view text);

// Cuts `text` so that EstimateTokens(result) <= max_tokens, preferring a
// whitespace boundary.
std::string TruncateToTokens(std::string_view text, int max_tokens);

// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
uint64_t Fnv1a64(std::string_view data);

}  // namespace menta::text

#endif  // MENTA_TEXT_H_
