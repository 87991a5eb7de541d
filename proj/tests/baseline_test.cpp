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

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace srti {
namespace {

TEST(GenerateEr, ZeroProbabilityGivesEmptyLists) {
  const auto inst = generate_er({6, 0.0, 1});
  for (const auto& l : inst.lists()) EXPECT_EQ(l.size(), 0u);
  const auto r = enumerate_stable(inst);
  ASSERT_EQ(r.count, 1u);
  EXPECT_EQ(r.matchings[0], Matching::all_single(6));
}

TEST(GenerateEr, FullProbabilityGivesCompleteStrictLists) {
  const auto inst = generate_er({7, 1.0, 2});
  EXPECT_EQ(inst.m(), 6u);
  for (AgentId x = 1; x <= 7; ++x) {
    EXPECT_EQ(inst.list(x).size(), 6u);
    EXPECT_EQ(inst.list(x).group_count(), 6u);
  }
}

TEST(GenerateEr, AcceptabilityIsSymmetric) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto inst = generate_er({9, 0.4, s});
    for (AgentId x = 1; x <= 9; ++x)
      for (AgentId y = 1; y <= 9; ++y)
        if (x != y) {
          ASSERT_EQ(inst.list(x).contains(y), inst.list(y).contains(x));
        }
  }
}

TEST(GenerateEr, Deterministic) {
  EXPECT_EQ(generate_er({12, 0.5, 99}), generate_er({12, 0.5, 99}));
  EXPECT_NE(generate_er({12, 0.5, 99}), generate_er({12, 0.5, 100}));
}

TEST(GenerateEr, EdgeDensityTracksP) {
  std::size_t entries = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = generate_er({30, 0.3, s});
    for (const auto& l : inst.lists()) entries += l.size();
  }
  const double density = static_cast<double>(entries) / (20.0 * 30 * 29);
  EXPECT_NEAR(density, 0.3, 0.03);
}

TEST(GenerateEr, RejectsBadParameters) {
  EXPECT_THROW(generate_er({1, 0.5, 0}), UsageError);
  EXPECT_THROW(generate_er({5, -0.1, 0}), UsageError);
  EXPECT_THROW(generate_er({5, 1.1, 0}), UsageError);
}

}  // namespace
}  // namespace srti
