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

#ifndef SRTI_BASELINE_HPP
#define SRTI_BASELINE_HPP

#include <cstdint>
#include <vector>

#include "srti/core.hpp"
#include "srti/random.hpp"

namespace srti {

/// G(n, p) roommates instances: every unordered pair is mutually acceptable
/// with probability p, and each agent ranks its acceptable partners in a
/// uniformly random strict order.
struct ErParams {
  std::size_t n = 2;
  double p = 1.0;
  std::uint64_t rng_seed = 0;
};

inline Instance generate_er(const ErParams& params) {
  if (params.n < 2) throw UsageError("baseline needs n > 1");
  if (!(params.p >= 0.0 && params.p <= 1.0)) throw UsageError("p must lie in [0, 1]");
  Rng rng(params.rng_seed);
  const auto n = static_cast<AgentId>(params.n);
  std::vector<std::vector<AgentId>> partners(n + 1);
  for (AgentId x = 1; x <= n; ++x)
    for (AgentId y = x + 1; y <= n; ++y)
      if (rng.uniform01() < params.p) {
        partners[x].push_back(y);
        partners[y].push_back(x);
      }
  std::vector<PreferenceList> lists;
  lists.reserve(n);
  for (AgentId x = 1; x <= n; ++x) {
    rng.shuffle(partners[x]);
    std::vector<PreferenceList::Group> groups;
    for (AgentId y : partners[x]) groups.push_back({y});
    lists.emplace_back(std::move(groups));
  }
  return Instance(params.n, params.n - 1, std::move(lists));
}

}  // namespace srti

#endif  // SRTI_BASELINE_HPP
