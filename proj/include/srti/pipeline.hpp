// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The benchmark recipe: every block of 20 agents is built from three seeds
// with (n, k) = (8, 6), (8, 6), (6, 2) and m = n - 1, and all seeds are then
// combined in one pass. p1 = 0 asks for complete seed lists and p2 = 0 for
// tie-free seed lists, mirroring the edge-case constraints on seeds.

#ifndef SRTI_PIPELINE_HPP
#define SRTI_PIPELINE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srti/combine.hpp"
#include "srti/seedgen.hpp"

namespace srti {

struct PipelineSpec {
  std::size_t n_total = 20;
  double p1 = 0.0;
  double p2 = 0.0;
  std::size_t instances = 1;
  std::uint64_t rng_seed = 0;
  std::uint64_t attempt_budget = kDefaultAttemptBudget;
  std::optional<std::size_t> m_cap;
};

struct BlockSeedShape {
  std::size_t n;
  std::size_t k;
};

inline constexpr std::array<BlockSeedShape, 3> kBlockRecipe{{{8, 6}, {8, 6}, {6, 2}}};
inline constexpr std::size_t kBlockAgents = 20;

/// Seed parameters for the recipe, with the modes implied by p1 and p2.
inline std::vector<SeedParams> pipeline_seed_params(const PipelineSpec& spec,
                                                    std::size_t instance_index) {
  if (spec.n_total == 0 || spec.n_total % kBlockAgents != 0)
    throw UsageError("n_total must be a positive multiple of 20");
  std::vector<SeedParams> out;
  const std::size_t blocks = spec.n_total / kBlockAgents;
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t j = 0; j < kBlockRecipe.size(); ++j) {
      SeedParams p;
      p.n = kBlockRecipe[j].n;
      p.m = p.n - 1;
      p.k = kBlockRecipe[j].k;
      p.completeness = spec.p1 == 0.0 ? Completeness::complete : Completeness::any;
      p.ties = spec.p2 == 0.0   ? TieMode::forbid_ties
               : spec.p2 == 1.0 ? TieMode::all_tied
                                : TieMode::any;
      p.attempt_budget = spec.attempt_budget;
      // Distinct, reproducible stream per (instance, seed slot).
      p.rng_seed = spec.rng_seed ^ (0x9E3779B97F4A7C15ULL * (instance_index + 1)) ^
                   (0xC2B2AE3D27D4EB4FULL * (b * kBlockRecipe.size() + j + 1));
      out.push_back(p);
    }
  }
  return out;
}

struct PipelineItem {
  std::optional<CombinedInstance> combined;  // absent if some seed ran out of budget
  CombineParams params;
  std::string failure;
};

/// Builds instance number `index` of the spec.
inline PipelineItem run_pipeline_item(const PipelineSpec& spec, std::size_t index) {
  PipelineItem item;
  item.params.p1 = spec.p1;
  item.params.p2 = spec.p2;
  item.params.m_cap = spec.m_cap;
  item.params.rng_seed = spec.rng_seed + index;
  std::vector<SeedInstance> seeds;
  for (const auto& sp : pipeline_seed_params(spec, index)) {
    auto result = generate_seed(sp);
    if (!result.seed) {
      item.failure = "seed (" + std::to_string(sp.n) + "," + std::to_string(sp.m) + "," +
                     std::to_string(sp.k) + ") not found within " +
                     std::to_string(sp.attempt_budget) + " attempts";
      return item;
    }
    seeds.push_back(std::move(*result.seed));
  }
  item.combined = combine(seeds, item.params);
  return item;
}

}  // namespace srti

#endif  // SRTI_PIPELINE_HPP
