// Copyright 2026 The cpesdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON encodings of result types and the config fingerprint embedded in
// every emitted file.

#pragma once

#include <cstdio>
#include <string>

#include "cpesdp/bench.hpp"
#include "cpesdp/calibrate.hpp"
#include "cpesdp/qos.hpp"
#include "cpesdp/rng.hpp"
#include "json.hpp"

namespace cpesdp {

// FNV-1a of the canonical (sorted-key) JSON dump, as 16 hex digits.
inline std::string ConfigHash(const nlohmann::json& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(internal::Fnv1a64(config.dump())));
  return buf;
}

inline void to_json(nlohmann::json& j, const DesignResult& r) {
  j = {{"k1", r.k1},
       {"scale", r.scale},
       {"epsilon", r.epsilon},
       {"predicted_impact", r.predicted_impact}};
}

inline void to_json(nlohmann::json& j, const CostReport& r) {
  j = {{"privacy_cost", r.privacy_cost},
       {"security_cost", r.security_cost},
       {"defense_cost", r.defense_cost},
       {"epsilon", r.epsilon}};
}

inline void to_json(nlohmann::json& j, const BenchResult& r) {
  j = {{"dp_seconds", r.dp_seconds},
       {"aes_seconds", r.aes_seconds},
       {"speedup", r.speedup},
       {"batch_size", r.batch_size},
       {"repetitions", r.repetitions},
       {"machine",
        {{"cpu_model", r.cpu_model},
         {"aes_instructions", r.cpu_has_aes_instructions},
         {"timestamp", r.timestamp}}}};
}

}  // namespace cpesdp
