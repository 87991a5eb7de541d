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

// Seed & combine: merge seed instances over disjoint agent sets into one
// larger instance by randomly cross-linking preference lists, while keeping
// every union of one witness per seed stable. The product of the witness
// set sizes is then a lower bound on the stable matching count.
//
// A trial "add x to the list of y" (x, y from different seeds):
//   1. Skip when y's list is full (m_cap) or already holds x. Otherwise draw
//      r1 and r2 uniformly from [0, 1).
//   2. If r1 > p1 and y is not in x's list, the pair stays one-sided: add x,
//      tied into a random existing group when r2 < p2, else as a new last
//      group.
//   3. If r1 > p1 and y is in x's list, the pair becomes mutually acceptable.
//      Refuse if y is single in some witness of its seed and x is either
//      single in some witness of its seed or strictly prefers y to one of its
//      witness partners. Otherwise add x as in 2; when y is matched in every
//      witness, x must land at a rank no better than any of y's witness
//      partners, so y never strictly prefers x to its partner.
// Ranks of already-listed agents never change (additions join a group or
// open a new last group), which keeps earlier guard decisions valid.

#ifndef SRTI_COMBINE_HPP
#define SRTI_COMBINE_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "srti/core.hpp"
#include "srti/random.hpp"
#include "srti/seedgen.hpp"

namespace srti {

struct CombineParams {
  double p1 = 0.0;  // incompleteness: an addition is attempted when r1 > p1
  double p2 = 0.0;  // ties: an added agent joins a tie when r2 < p2
  std::optional<std::size_t> m_cap;  // defaults to the largest seed m
  std::uint64_t rng_seed = 0;
  bool smti_mode = false;  // never link agents of the same class
  bool symmetric = false;  // add x to y's list only together with y to x's
};

/// A seed placed on the combined id range: its agents a = 1..n become
/// offset + a. `witnesses` are the seed's witnesses over the combined ids.
struct SeedBlock {
  AgentId offset = 0;
  SeedInstance seed;
  std::vector<Matching> witnesses;
};

struct CombinedInstance {
  Instance instance;
  std::vector<SeedBlock> seeds;
  std::uint64_t lower_bound = 1;  // product of witness set sizes
  std::uint64_t rng_seed = 0;
};

enum class TrialOutcome {
  skipped_class,     // smti_mode, same side
  skipped_full,      // y's list (or x's, in symmetric mode) has m_cap agents
  skipped_present,   // x already listed by y
  not_selected,      // r1 <= p1
  added_one_sided,   // step 2
  added_mutual,      // step 3, guard passed
  refused,           // step 3, pair would block some witness union
};

struct TrialRecord {
  AgentId x = 0;
  AgentId y = 0;
  TrialOutcome outcome = TrialOutcome::skipped_full;
};

/// Relabels seed i onto the id block following seed i-1, carrying witnesses
/// along.
inline std::vector<SeedBlock> rename_disjoint(const std::vector<SeedInstance>& seeds) {
  if (seeds.empty()) throw UsageError("combine needs at least one seed");
  std::size_t total = 0;
  for (const auto& s : seeds) total += s.instance.n();
  std::vector<SeedBlock> blocks;
  AgentId offset = 0;
  for (const auto& s : seeds) {
    SeedBlock block{offset, s, {}};
    for (const auto& mu : s.witnesses) {
      std::vector<AgentId> mates(total + 1, 0);
      for (AgentId a = 1; a <= s.instance.n(); ++a)
        if (mu.mate(a) != 0) mates[a + offset] = mu.mate(a) + offset;
      block.witnesses.push_back(Matching::from_mates(std::move(mates)));
    }
    blocks.push_back(std::move(block));
    offset += static_cast<AgentId>(s.instance.n());
  }
  return blocks;
}

/// Working state of a combine run: the evolving lists over global ids plus
/// what the guards need to know about each agent's witnesses.
class CombineState {
 public:
  CombineState(const std::vector<SeedBlock>& blocks, std::size_t m_cap)
      : m_cap_(m_cap),
        n_(total_agents(blocks)),
        lists_(n_),
        seed_of_(n_ + 1, 0),
        single_somewhere_(n_ + 1, false),
        partners_(n_ + 1),
        classes_(n_ + 1, 0),
        has_classes_(true) {
    for (std::size_t s = 0; s < blocks.size(); ++s) {
      const auto& seed = blocks[s].seed;
      const AgentId off = blocks[s].offset;
      const auto& inst = seed.instance;
      if (seed.classes.size() != inst.n()) has_classes_ = false;
      for (AgentId a = 1; a <= inst.n(); ++a) {
        const AgentId g = a + off;
        seed_of_[g] = s;
        std::vector<PreferenceList::Group> groups;
        for (const auto& grp : inst.list(a).groups()) {
          PreferenceList::Group shifted;
          for (AgentId b : grp) shifted.push_back(b + off);
          groups.push_back(std::move(shifted));
        }
        lists_[g - 1] = PreferenceList(std::move(groups));
        if (has_classes_) classes_[g] = seed.classes[a - 1];
        for (const auto& mu : seed.witnesses) {
          const AgentId p = mu.mate(a);
          if (p == 0)
            single_somewhere_[g] = true;
          else if (std::find(partners_[g].begin(), partners_[g].end(), p + off) ==
                   partners_[g].end())
            partners_[g].push_back(p + off);
        }
      }
    }
  }

  static std::size_t total_agents(const std::vector<SeedBlock>& blocks) {
    std::size_t total = 0;
    for (const auto& b : blocks) total += b.seed.instance.n();
    return total;
  }

  [[nodiscard]] std::size_t agents() const noexcept { return n_; }
  [[nodiscard]] std::size_t seed_of(AgentId a) const { return seed_of_.at(a); }
  [[nodiscard]] const PreferenceList& list(AgentId a) const { return lists_.at(a - 1); }
  [[nodiscard]] const std::vector<PreferenceList>& lists() const noexcept { return lists_; }
  [[nodiscard]] bool has_classes() const noexcept { return has_classes_; }
  [[nodiscard]] std::uint8_t agent_class(AgentId a) const { return classes_.at(a); }
  [[nodiscard]] std::size_t m_cap() const noexcept { return m_cap_; }

  [[nodiscard]] bool single_somewhere(AgentId a) const { return single_somewhere_.at(a); }
  [[nodiscard]] bool matched_everywhere(AgentId a) const { return !single_somewhere_.at(a); }

  /// Worst (largest) rank any witness partner of `a` holds in a's list; 1
  /// when a has no partner.
  [[nodiscard]] std::uint32_t worst_partner_rank(AgentId a) const {
    std::uint32_t worst = 1;
    for (AgentId p : partners_.at(a)) worst = std::max(worst, *lists_[a - 1].rank_of(p));
    return worst;
  }

  /// Whether `x` strictly prefers `y` to at least one of its witness
  /// partners. y must be listed by x.
  [[nodiscard]] bool prefers_to_some_partner(AgentId x, AgentId y) const {
    const auto ry = *lists_[x - 1].rank_of(y);
    for (AgentId p : partners_.at(x))
      if (ry < *lists_[x - 1].rank_of(p)) return true;
    return false;
  }

  /// Inserts x into y's list at rank >= min_rank. Tied: uniform over the
  /// eligible existing groups, or a new last group when none is eligible.
  void insert(AgentId y, AgentId x, bool tied, std::uint32_t min_rank, Rng& rng) {
    auto& list = lists_[y - 1];
    const std::size_t groups = list.group_count();
    const std::size_t first = min_rank - 1;
    if (tied && first < groups)
      list.join_group(first + rng.below(groups - first), x);
    else
      list.append_group(x);
  }

 private:
  std::size_t m_cap_;
  std::size_t n_;
  std::vector<PreferenceList> lists_;
  std::vector<std::size_t> seed_of_;
  std::vector<bool> single_somewhere_;
  std::vector<std::vector<AgentId>> partners_;
  std::vector<std::uint8_t> classes_;
  bool has_classes_;
};

namespace detail {

// Step-3 guard for adding x to y's list when y is already listed by x.
// Returns the minimum rank for x in y's list, or nullopt to refuse.
inline std::optional<std::uint32_t> mutual_guard(const CombineState& st, AgentId x, AgentId y) {
  const bool x_side_blocks =
      st.single_somewhere(x) || st.prefers_to_some_partner(x, y);
  if (st.single_somewhere(y) && x_side_blocks) return std::nullopt;
  if (st.matched_everywhere(y)) return st.worst_partner_rank(y);
  // Passed on x's side alone: x never wants y over its partner.
  return 1u;
}

inline bool full(const CombineState& st, AgentId a) { return st.list(a).size() >= st.m_cap(); }

}  // namespace detail

/// One trial of adding x to y's list. x and y must come from different
/// seeds.
inline TrialOutcome trial_add(AgentId x, AgentId y, CombineState& st, const CombineParams& params,
                              Rng& rng) {
  if (st.seed_of(x) == st.seed_of(y))
    throw UsageError("trial_add needs agents from different seeds");
  if (params.smti_mode && st.agent_class(x) == st.agent_class(y))
    return TrialOutcome::skipped_class;

  if (params.symmetric) {
    if (detail::full(st, y) || detail::full(st, x)) return TrialOutcome::skipped_full;
    if (st.list(y).contains(x) || st.list(x).contains(y)) return TrialOutcome::skipped_present;
    const double r1 = rng.uniform01();
    const double r2 = rng.uniform01();
    if (!(r1 > params.p1)) return TrialOutcome::not_selected;
    // Both entries appear together, so the pair is mutual from the start and
    // one side must be matched in every witness to absorb it.
    const bool y_absorbs = st.matched_everywhere(y);
    const bool x_absorbs = st.matched_everywhere(x);
    if (!y_absorbs && !x_absorbs) return TrialOutcome::refused;
    const std::uint32_t min_in_y = y_absorbs ? st.worst_partner_rank(y) : 1u;
    const std::uint32_t min_in_x = x_absorbs ? st.worst_partner_rank(x) : 1u;
    const bool tied = r2 < params.p2;
    st.insert(y, x, tied, min_in_y, rng);
    st.insert(x, y, tied, min_in_x, rng);
    return TrialOutcome::added_mutual;
  }

  if (detail::full(st, y)) return TrialOutcome::skipped_full;
  if (st.list(y).contains(x)) return TrialOutcome::skipped_present;
  const double r1 = rng.uniform01();
  const double r2 = rng.uniform01();
  if (!(r1 > params.p1)) return TrialOutcome::not_selected;
  const bool tied = r2 < params.p2;

  if (!st.list(x).contains(y)) {
    st.insert(y, x, tied, 1, rng);
    return TrialOutcome::added_one_sided;
  }
  const auto min_rank = detail::mutual_guard(st, x, y);
  if (!min_rank) return TrialOutcome::refused;
  st.insert(y, x, tied, *min_rank, rng);
  return TrialOutcome::added_mutual;
}

struct CombineReport {
  CombinedInstance combined;
  std::vector<TrialRecord> trials;
};

namespace detail {

inline std::uint64_t checked_product(const std::vector<SeedInstance>& seeds) {
  std::uint64_t product = 1;
  for (const auto& s : seeds) {
    const std::uint64_t k = s.witnesses.size();
    if (k != 0 && product > std::numeric_limits<std::uint64_t>::max() / k)
      throw UsageError("lower bound overflows 64 bits");
    product *= k;
  }
  return product;
}

}  // namespace detail

/// Runs every cross-seed trial in ascending (y, x) order and returns the
/// combined instance together with the trial log.
inline CombineReport combine_with_log(const std::vector<SeedInstance>& seeds,
                                      const CombineParams& params) {
  if (!(params.p1 >= 0.0 && params.p1 <= 1.0) || !(params.p2 >= 0.0 && params.p2 <= 1.0))
    throw UsageError("p1 and p2 must lie in [0, 1]");
  auto blocks = rename_disjoint(seeds);
  const std::size_t total = CombineState::total_agents(blocks);

  std::size_t max_m = 0;
  std::size_t longest = 0;
  for (const auto& b : blocks) {
    max_m = std::max(max_m, b.seed.instance.m());
    for (const auto& l : b.seed.instance.lists()) longest = std::max(longest, l.size());
  }
  const std::size_t m_cap = params.m_cap.value_or(max_m);
  if (m_cap < longest)
    throw UsageError("m_cap " + std::to_string(m_cap) + " is below a seed list length of " +
                     std::to_string(longest));
  if (m_cap < 1 || m_cap >= total)
    throw UsageError("m_cap must satisfy 0 < m_cap < total agents");

  CombineState state(blocks, m_cap);
  if (params.smti_mode && !state.has_classes())
    throw UsageError("smti mode needs class labels on every seed");

  Rng rng(params.rng_seed);
  std::vector<TrialRecord> trials;
  const auto n = static_cast<AgentId>(total);
  for (AgentId y = 1; y <= n; ++y)
    for (AgentId x = 1; x <= n; ++x)
      if (state.seed_of(x) != state.seed_of(y))
        trials.push_back({x, y, trial_add(x, y, state, params, rng)});

  const auto lower_bound = detail::checked_product(seeds);
  return CombineReport{
      CombinedInstance{Instance(total, m_cap, state.lists()), std::move(blocks), lower_bound,
                       params.rng_seed},
      std::move(trials)};
}

inline CombinedInstance combine(const std::vector<SeedInstance>& seeds,
                                const CombineParams& params) {
  return combine_with_log(seeds, params).combined;
}

inline constexpr std::uint64_t kDefaultPreservationBound = 1'000'000;

struct PreservationCheck {
  bool ok = true;
  std::optional<Matching> counterexample;
  std::vector<AgentPair> blocking;  // pairs blocking the counterexample
};

/// Checks that every union of one witness per seed is stable for the
/// combined instance. Witnesses in `combined.seeds` are on global ids.
inline PreservationCheck verify_preservation(const CombinedInstance& combined,
                                             std::uint64_t bound = kDefaultPreservationBound) {
  const auto& seeds = combined.seeds;
  if (seeds.empty()) throw UsageError("combined instance carries no seeds");
  std::uint64_t product = 1;
  for (const auto& s : seeds) {
    if (s.witnesses.empty()) return {};
    if (product > bound / s.witnesses.size())
      throw UsageError("witness product exceeds the iteration bound of " + std::to_string(bound));
    product *= s.witnesses.size();
  }
  const std::size_t n = combined.instance.n();
  std::vector<std::size_t> digit(seeds.size(), 0);
  for (std::uint64_t step = 0; step < product; ++step) {
    std::vector<AgentId> mates(n + 1, 0);
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto& mu = seeds[s].witnesses[digit[s]];
      if (mu.n() != n) throw ValidationError("witness size does not match combined instance");
      for (AgentId a = 1; a <= n; ++a)
        if (mu.mate(a) != 0) mates[a] = mu.mate(a);
    }
    auto uni = Matching::from_mates(std::move(mates));
    auto blocks = blocking_pairs(combined.instance, uni);
    if (!blocks.empty()) return {false, std::move(uni), std::move(blocks)};
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      if (++digit[s] < seeds[s].witnesses.size()) break;
      digit[s] = 0;
    }
  }
  return {};
}

}  // namespace srti

#endif  // SRTI_COMBINE_HPP
