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

#include "menta/prompts.h"

#include <sstream>

#include "menta/text.h"

namespace menta::prompts {

std::string_view RagSystem() { return assets::k_rag_system; }
std::string_view RagUser() { return assets::k_rag_user; }
std::string_view InstructionDefenseSystem() {
  return assets::k_instruction_defense_system;
}
std::string_view Paraphrase() { return assets::k_paraphrase; }
std::string_view QueryGeneration() { return assets::k_query_generation; }
std::string_view Summary() { return assets::k_summary; }
std::string_view LlmDetector() { return assets::k_llm_detector; }

const std::vector<std::string>& RefusalHypotheses() {
  static const std::vector<std::string> hypotheses = [] {
    std::vector<std::string> out;
    std::istringstream in(assets::k_refusal_hypotheses);
    std::string line;
    while (std::getline(in, line)) {
      line = text::Trim(line);
      if (!line.empty()) out.push_back(line);
    }
    return out;
  }();
  return hypotheses;
}

std::string Render(std::string_view tmpl,
                   const std::map<std::string, std::string, std::less<>>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const size_t close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = vars.find(tmpl.substr(i + 1, close - i - 1));
        if (it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i]);
    ++i;
  }
  return out;
}

}  // namespace menta::prompts
