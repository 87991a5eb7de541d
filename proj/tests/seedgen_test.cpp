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

// Declarative checks, written against the raw seed and independent of both
// the generator and validate_seed: unique ranks, consecutive ranks from 1,
// at most m listed agents, symmetric and non-overlapping pairings, pairwise
// distinct witnesses, no blocking pair.
void expect_declarative_constraints(const SeedInstance& seed) {
  const auto& inst = seed.instance;
  const auto& p = seed.params;
  for (AgentId x = 1; x <= inst.n(); ++x) {
    std::map<AgentId, int> rank_of;
    int r = 0;
    for (const auto& g : inst.list(x).groups()) {
      ++r;
      ASSERT_FALSE(g.empty()) << "rank " << r << " of agent " << x << " is empty";
      for (AgentId y : g) ASSERT_TRUE(rank_of.emplace(y, r).second);
    }
    ASSERT_LE(rank_of.size(), p.m);
    ASSERT_FALSE(rank_of.count(x));
    if (p.completeness == Completeness::complete) {
      ASSERT_EQ(rank_of.size(), p.n - 1);
    }
    if (p.ties == TieMode::forbid_ties) {
      for (const auto& g : inst.list(x).groups()) ASSERT_EQ(g.size(), 1u);
    }
    if (p.ties == TieMode::all_tied) {
      ASSERT_LE(inst.list(x).group_count(), 1u);
    }
    if (p.symmetric) {
      for (const auto& [y, _] : rank_of) ASSERT_TRUE(inst.list(y).contains(x));
    }
  }
  ASSERT_EQ(seed.witnesses.size(), p.k);
  for (std::size_t i = 0; i < seed.witnesses.size(); ++i) {
    const auto& mates = seed.witnesses[i].mates();
    for (AgentId a = 1; a <= inst.n(); ++a)
      if (mates[a] != 0) {
        ASSERT_EQ(mates[mates[a]], a);
      }
    ASSERT_TRUE(testing::oracle_blocking(inst, mates).empty());
    for (std::size_t j = 0; j < i; ++j) {
      bool differs = false;
      for (AgentId a = 1; a <= inst.n(); ++a)
        differs = differs || seed.witnesses[j].mate(a) != seed.witnesses[i].mate(a);
      ASSERT_TRUE(differs);
    }
  }
}

SeedParams params(std::size_t n, std::size_t m, std::size_t k, std::uint64_t rng_seed) {
  SeedParams p;
  p.n = n;
  p.m = m;
  p.k = k;
  p.rng_seed = rng_seed;
  return p;
}

TEST(GenerateSeed, FourAgentsTwoMatchings) {
  const auto r = generate_seed(params(4, 3, 2, 1));
  ASSERT_TRUE(r.seed.has_value());
  EXPECT_TRUE(validate_seed(*r.seed).ok) << validate_seed(*r.seed).diagnostic;
  EXPECT_GE(count_stable(r.seed->instance).count, 2u);
  expect_declarative_constraints(*r.seed);
}

TEST(GenerateSeed, TwoAgentMutualInstance) {
  auto p = params(2, 1, 1, 5);
  p.completeness = Completeness::complete;
  p.ties = TieMode::forbid_ties;
  p.symmetric = true;
  const auto r = generate_seed(p);
  ASSERT_TRUE(r.seed.has_value());
  EXPECT_EQ(r.seed->instance.list(1), PreferenceList({{2}}));
  EXPECT_EQ(r.seed->instance.list(2), PreferenceList({{1}}));
  ASSERT_EQ(r.seed->witnesses.size(), 1u);
  EXPECT_EQ(r.seed->witnesses[0].pairs(), std::vector<AgentPair>{AgentPair(1, 2)});
}

TEST(GenerateSeed, RecipeSeedWithoutTies) {
  auto p = params(8, 7, 6, 3);
  p.ties = TieMode::forbid_ties;
  const auto r = generate_seed(p);
  ASSERT_TRUE(r.seed.has_value());
  EXPECT_TRUE(validate_seed(*r.seed).ok);
  EXPECT_GE(count_stable(r.seed->instance).count, 6u);
  expect_declarative_constraints(*r.seed);
}

TEST(GenerateSeed, AllModes) {
  std::uint64_t rng_seed = 100;
  for (auto completeness : {Completeness::any, Completeness::complete})
    for (auto ties : {TieMode::any, TieMode::forbid_ties, TieMode::all_tied})
      for (bool symmetric : {false, true}) {
        auto p = params(6, completeness == Completeness::complete ? 5 : 3, 2, ++rng_seed);
        p.completeness = completeness;
        p.ties = ties;
        p.symmetric = symmetric;
        const auto r = generate_seed(p);
        ASSERT_TRUE(r.seed.has_value())
            << "complete=" << (completeness == Completeness::complete)
            << " ties=" << to_string(ties) << " symmetric=" << symmetric;
        const auto check = validate_seed(*r.seed);
        EXPECT_TRUE(check.ok) << check.diagnostic;
        expect_declarative_constraints(*r.seed);
      }
}

TEST(GenerateSeed, Deterministic) {
  const auto a = generate_seed(params(7, 4, 3, 42));
  const auto b = generate_seed(params(7, 4, 3, 42));
  ASSERT_TRUE(a.seed && b.seed);
  EXPECT_EQ(a.seed->instance, b.seed->instance);
  EXPECT_EQ(a.seed->witnesses, b.seed->witnesses);
  EXPECT_EQ(a.attempts, b.attempts);
}

TEST(GenerateSeed, ReportsBudgetExhaustion) {
  // Two agents admit at most one stable matching.
  auto p = params(2, 1, 2, 0);
  p.attempt_budget = 50;
  const auto r = generate_seed(p);
  EXPECT_FALSE(r.seed.has_value());
  EXPECT_EQ(r.attempts, 50u);
}

TEST(GenerateSeed, RejectsBadParameters) {
  EXPECT_THROW(generate_seed(params(1, 1, 1, 0)), UsageError);
  EXPECT_THROW(generate_seed(params(4, 4, 1, 0)), UsageError);
  EXPECT_THROW(generate_seed(params(4, 0, 1, 0)), UsageError);
  EXPECT_THROW(generate_seed(params(4, 3, 0, 0)), UsageError);
  auto p = params(5, 3, 1, 0);
  p.completeness = Completeness::complete;
  EXPECT_THROW(generate_seed(p), UsageError);
}

TEST(ValidateSeed, WorkedExampleSeed) {
  const auto seed = testing::load_seed_fixture("seed_a.srti");
  const auto check = validate_seed(seed);
  EXPECT_TRUE(check.ok) << check.diagnostic;
}

TEST(ValidateSeed, DuplicateWitness) {
  auto seed = testing::load_seed_fixture("seed_a.srti");
  seed.witnesses[1] = seed.witnesses[0];
  const auto check = validate_seed(seed);
  EXPECT_FALSE(check.ok);
  EXPECT_NE(check.diagnostic.find("duplicates"), std::string::npos) << check.diagnostic;
}

TEST(ValidateSeed, UnacceptablePair) {
  auto seed = testing::load_seed_fixture("seed_a.srti");
  seed.witnesses[0] = Matching::from_pairs(4, {{1, 2}});
  const auto check = validate_seed(seed);
  EXPECT_FALSE(check.ok);
  EXPECT_NE(check.diagnostic.find("not mutually acceptable"), std::string::npos);
}

TEST(ValidateSeed, UnstableWitnessAndWrongCount) {
  auto seed = testing::load_seed_fixture("seed_a.srti");
  seed.witnesses[0] = Matching::all_single(4);
  EXPECT_NE(validate_seed(seed).diagnostic.find("blocked"), std::string::npos);
  seed = testing::load_seed_fixture("seed_a.srti");
  seed.witnesses.pop_back();
  EXPECT_FALSE(validate_seed(seed).ok);
}

TEST(ValidateSeed, ModeViolations) {
  auto seed = testing::load_seed_fixture("seed_a.srti");
  seed.params.ties = TieMode::forbid_ties;  // agent 4 has a tie
  EXPECT_NE(validate_seed(seed).diagnostic.find("tie"), std::string::npos);
  seed.params.ties = TieMode::any;
  seed.params.symmetric = true;  // 3 lists 2 but not vice versa
  EXPECT_NE(validate_seed(seed).diagnostic.find("not vice versa"), std::string::npos);
  seed.params.symmetric = false;
  seed.params.completeness = Completeness::complete;
  EXPECT_NE(validate_seed(seed).diagnostic.find("not complete"), std::string::npos);
}

TEST(GenerateSeed, SoundOverManySeeds) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    auto p = params(3 + s % 6, 0, 1 + s % 4, s);
    p.m = 1 + s % (p.n - 1);
    p.ties = static_cast<TieMode>(s % 3);
    const auto r = generate_seed(p);
    if (!r.seed) continue;
    ASSERT_TRUE(validate_seed(*r.seed).ok) << validate_seed(*r.seed).diagnostic;
    expect_declarative_constraints(*r.seed);
  }
}

}  // namespace
}  // namespace srti
