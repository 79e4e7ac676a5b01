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

#include "menta/error.h"

#include "menta/rng.h"
#include "menta/text.h"

namespace menta {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kInsufficientData: return "insufficient_data";
    case ErrorCode::kConfiguration: return "configuration";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kBackend: return "backend";
    case ErrorCode::kShortfall: return "generation_shortfall";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kIndexing: return "indexing";
    case ErrorCode::kRunInvalid: return "run_invalid";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kTransport:
    case ErrorCode::kBackend:
      return 3;
    case ErrorCode::kRunInvalid:
      return 4;
    default:
      return 2;
  }
}

uint64_t DeriveSeed(uint64_t master, std::string_view stream) {
  // splitmix64 finalizer over master ^ hash(stream name).
  uint64_t z = master ^ text::Fnv1a64(stream);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace menta
