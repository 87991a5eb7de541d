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

// Seed instance generation: small instances that come with k distinct
// stable matchings.
//
// The generator is a restarting local search. It samples a random instance
// that already respects the requested list modes, counts its stable
// matchings (capped at k) with the enumerator, and then applies random
// mode-preserving edits, keeping every edit that does not lower the count.
// Every `restart_interval` evaluations without success it starts over from
// a fresh sample. The first k matchings in enumeration order become the
// witness set.

#ifndef SRTI_SEEDGEN_HPP
#define SRTI_SEEDGEN_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srti/core.hpp"
#include "srti/enumerate.hpp"
#include "srti/random.hpp"

namespace srti {

enum class Completeness { any, complete };
enum class TieMode { any, forbid_ties, all_tied };

inline constexpr std::uint64_t kDefaultAttemptBudget = 200000;
inline constexpr std::uint64_t kDefaultRestartInterval = 2000;

struct SeedParams {
  std::size_t n = 2;
  std::size_t m = 1;
  std::size_t k = 1;
  Completeness completeness = Completeness::any;
  TieMode ties = TieMode::any;
  bool symmetric = false;
  std::uint64_t rng_seed = 0;
  std::uint64_t attempt_budget = kDefaultAttemptBudget;  // candidate instances evaluated
  std::uint64_t restart_interval = kDefaultRestartInterval;
};

/// An instance plus a witness set of k pairwise distinct stable matchings.
/// `classes` optionally tags each agent (index agent-1) with a side for
/// bipartite use; empty means untagged.
struct SeedInstance {
  Instance instance;
  std::vector<Matching> witnesses;
  SeedParams params;
  std::vector<std::uint8_t> classes;
};

struct SeedResult {
  std::optional<SeedInstance> seed;  // absent: budget ran out
  std::uint64_t attempts = 0;
};

struct SeedCheck {
  bool ok = true;
  std::string diagnostic;  // first violated invariant, empty when ok
};

inline void check_seed_params(const SeedParams& p) {
  if (p.n < 2) throw UsageError("seed needs n > 1");
  if (p.m < 1 || p.m >= p.n) throw UsageError("seed needs 0 < m < n");
  if (p.k < 1) throw UsageError("seed needs k >= 1");
  if (p.completeness == Completeness::complete && p.m != p.n - 1)
    throw UsageError("complete lists require m = n - 1");
  if (p.attempt_budget < 1) throw UsageError("attempt budget must be positive");
  if (p.restart_interval < 1) throw UsageError("restart interval must be positive");
}

namespace detail {

class SeedSearch {
 public:
  SeedSearch(const SeedParams& p) : p_(p), rng_(p.rng_seed) {}

  std::vector<PreferenceList> sample() {
    std::vector<PreferenceList> lists(p_.n);
    for (AgentId a = 1; a <= p_.n; ++a) {
      std::vector<AgentId> others;
      for (AgentId b = 1; b <= p_.n; ++b)
        if (b != a) others.push_back(b);
      rng_.shuffle(others);
      const std::size_t len =
          p_.completeness == Completeness::complete ? p_.n - 1 : rng_.between(1, p_.m);
      others.resize(len);
      std::vector<PreferenceList::Group> groups;
      for (std::size_t i = 0; i < others.size(); ++i) {
        const bool open = groups.empty() || p_.ties == TieMode::forbid_ties ||
                          (p_.ties == TieMode::any && rng_.coin(0.5));
        if (open)
          groups.push_back({others[i]});
        else
          groups.back().push_back(others[i]);
      }
      lists[a - 1] = PreferenceList(std::move(groups));
    }
    if (p_.symmetric) {
      const auto original = lists;
      for (AgentId a = 1; a <= p_.n; ++a)
        for (AgentId b : original[a - 1].flatten())
          if (!original[b - 1].contains(a)) lists[a - 1].remove(b);
    }
    return lists;
  }

  /// Applies one random edit that keeps every mode constraint. Returns
  /// false when the drawn edit was not applicable.
  bool mutate(std::vector<PreferenceList>& lists) {
    const bool can_reorder = p_.ties != TieMode::all_tied;
    const bool can_resize = p_.completeness != Completeness::complete;
    if (!can_reorder && !can_resize) return false;
    const AgentId a = static_cast<AgentId>(rng_.between(1, p_.n));
    const bool reorder = can_reorder && (!can_resize || rng_.coin(0.5));
    if (reorder) return reorder_list(lists[a - 1]);
    return p_.symmetric ? toggle_mutual(lists, a) : edit_members(lists[a - 1], a);
  }

  Rng& rng() { return rng_; }

 private:
  bool reorder_list(PreferenceList& list) {
    if (list.size() < 2) return false;
    if (p_.ties == TieMode::forbid_ties) {
      auto flat = list.flatten();
      const std::size_t i = rng_.below(flat.size() - 1);
      std::swap(flat[i], flat[i + 1]);
      list = singletons(flat);
      return true;
    }
    auto flat = list.flatten();
    const AgentId b = flat[rng_.below(flat.size())];
    list.remove(b);
    insert_anywhere(list, b);
    return true;
  }

  // Non-symmetric membership edits: add, remove, or replace one agent.
  bool edit_members(PreferenceList& list, AgentId a) {
    std::vector<AgentId> unlisted;
    for (AgentId c = 1; c <= p_.n; ++c)
      if (c != a && !list.contains(c)) unlisted.push_back(c);
    const auto listed = list.flatten();
    std::vector<int> ops;
    if (listed.size() < p_.m && !unlisted.empty()) ops.push_back(0);
    if (listed.size() > 1) ops.push_back(1);
    if (!listed.empty() && !unlisted.empty()) ops.push_back(2);
    if (ops.empty()) return false;
    const AgentId c = unlisted.empty() ? 0 : unlisted[rng_.below(unlisted.size())];
    switch (ops[rng_.below(ops.size())]) {
      case 0:
        insert_anywhere(list, c);
        break;
      case 1:
        list.remove(listed[rng_.below(listed.size())]);
        break;
      default: {
        const AgentId b = listed[rng_.below(listed.size())];
        list = replaced(list, b, c);
        break;
      }
    }
    return true;
  }

  // Symmetric membership edit: add or drop a mutual pair {a, c}.
  bool toggle_mutual(std::vector<PreferenceList>& lists, AgentId a) {
    const AgentId c = static_cast<AgentId>(rng_.between(1, p_.n - 1));
    const AgentId other = c >= a ? c + 1 : c;
    auto& la = lists[a - 1];
    auto& lo = lists[other - 1];
    if (la.contains(other)) {
      la.remove(other);
      lo.remove(a);
      return true;
    }
    if (la.size() >= p_.m || lo.size() >= p_.m) return false;
    insert_anywhere(la, other);
    insert_anywhere(lo, a);
    return true;
  }

  void insert_anywhere(PreferenceList& list, AgentId b) {
    auto groups = list.groups();
    switch (p_.ties) {
      case TieMode::forbid_ties:
        groups.insert(groups.begin() + static_cast<std::ptrdiff_t>(rng_.below(groups.size() + 1)),
                      PreferenceList::Group{b});
        break;
      case TieMode::all_tied:
        if (groups.empty())
          groups.push_back({b});
        else
          groups.front().push_back(b);
        break;
      case TieMode::any: {
        // groups.size() joins plus groups.size() + 1 fresh positions
        const std::size_t slot = rng_.below(2 * groups.size() + 1);
        if (slot < groups.size())
          groups[slot].push_back(b);
        else
          groups.insert(groups.begin() + static_cast<std::ptrdiff_t>(slot - groups.size()),
                        PreferenceList::Group{b});
        break;
      }
    }
    list = PreferenceList(std::move(groups));
  }

  static PreferenceList singletons(const std::vector<AgentId>& order) {
    std::vector<PreferenceList::Group> groups;
    for (AgentId b : order) groups.push_back({b});
    return PreferenceList(std::move(groups));
  }

  static PreferenceList replaced(const PreferenceList& list, AgentId from, AgentId to) {
    auto groups = list.groups();
    for (auto& g : groups)
      for (auto& x : g)
        if (x == from) x = to;
    return PreferenceList(std::move(groups));
  }

  const SeedParams& p_;
  Rng rng_;
};

}  // namespace detail

/// Searches for a satisfiable (n, m, k)-seed instance under the requested
/// modes. Deterministic in `params.rng_seed`. Running out of budget is not
/// evidence that no such instance exists.
inline SeedResult generate_seed(const SeedParams& params) {
  check_seed_params(params);
  detail::SeedSearch search(params);
  SeedResult result;
  const auto evaluate = [&](const std::vector<PreferenceList>& lists) {
    ++result.attempts;
    const Instance inst(params.n, params.m, lists);
    return count_stable(inst, params.k, std::chrono::hours(1)).count;
  };

  while (result.attempts < params.attempt_budget) {
    auto current = search.sample();
    auto score = evaluate(current);
    std::uint64_t since_restart = 1;
    while (score < params.k && since_restart < params.restart_interval &&
           result.attempts < params.attempt_budget) {
      auto candidate = current;
      if (!search.mutate(candidate)) {
        // Nothing to edit in this mode; fall back to resampling.
        candidate = search.sample();
      }
      const auto candidate_score = evaluate(candidate);
      ++since_restart;
      if (candidate_score >= score) {
        current = std::move(candidate);
        score = candidate_score;
      }
    }
    if (score >= params.k) {
      Instance inst(params.n, params.m, std::move(current));
      auto found = enumerate_stable(inst, params.k, std::chrono::hours(1));
      result.seed = SeedInstance{std::move(inst), std::move(found.matchings), params, {}};
      return result;
    }
  }
  return result;
}

/// Re-checks every seed invariant from scratch; independent of the
/// generator.
inline SeedCheck validate_seed(const SeedInstance& seed) {
  const auto fail = [](std::string why) { return SeedCheck{false, std::move(why)}; };
  const auto& p = seed.params;
  const auto& inst = seed.instance;
  if (p.n < 2 || p.m < 1 || p.m >= p.n || p.k < 1)
    return fail("parameters violate n > 1, 0 < m < n, k >= 1");
  if (inst.n() != p.n)
    return fail("instance has " + std::to_string(inst.n()) +
                " agents, expected n=" + std::to_string(p.n));
  if (inst.m() != p.m) return fail("instance max length differs from m");

  for (AgentId x = 1; x <= inst.n(); ++x) {
    const auto& list = inst.list(x);
    const std::string who = "agent " + std::to_string(x) + ": ";
    std::vector<AgentId> seen;
    for (const auto& g : list.groups()) {
      if (g.empty()) return fail(who + "empty rank group breaks consecutive ranks");
      for (AgentId y : g) {
        if (y == x) return fail(who + "lists itself");
        if (y < 1 || y > inst.n()) return fail(who + "lists unknown agent");
        seen.push_back(y);
      }
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
      return fail(who + "an agent has two ranks");
    if (seen.size() > p.m) return fail(who + "list longer than m");
    if (p.completeness == Completeness::complete && seen.size() != p.n - 1)
      return fail(who + "list is not complete");
    if (p.ties == TieMode::forbid_ties)
      for (const auto& g : list.groups())
        if (g.size() > 1) return fail(who + "tie present although ties are forbidden");
    if (p.ties == TieMode::all_tied && list.group_count() > 1)
      return fail(who + "more than one rank although all agents must tie");
    if (p.symmetric)
      for (AgentId y : seen)
        if (!inst.list(y).contains(x))
          return fail(who + "lists " + std::to_string(y) + " but not vice versa");
  }

  if (seed.witnesses.size() != p.k)
    return fail("expected " + std::to_string(p.k) + " witnesses, got " +
                std::to_string(seed.witnesses.size()));
  for (std::size_t i = 0; i < seed.witnesses.size(); ++i) {
    const auto& mu = seed.witnesses[i];
    const std::string which = "witness " + std::to_string(i + 1) + ": ";
    if (mu.n() != inst.n()) return fail(which + "wrong number of agents");
    for (const auto& pr : mu.pairs())
      if (!inst.raw_acceptable(pr.first, pr.second))
        return fail(which + "pair (" + std::to_string(pr.first) + " " +
                    std::to_string(pr.second) + ") is not mutually acceptable");
    const auto blocks = blocking_pairs(inst, mu);
    if (!blocks.empty())
      return fail(which + "blocked by (" + std::to_string(blocks.front().first) + " " +
                  std::to_string(blocks.front().second) + ")");
    for (std::size_t j = 0; j < i; ++j)
      if (seed.witnesses[j] == mu)
        return fail(which + "duplicates witness " + std::to_string(j + 1));
  }
  if (!seed.classes.empty() && seed.classes.size() != inst.n())
    return fail("class labels do not cover every agent");

  if (count_stable(inst, p.k, std::chrono::seconds(60)).count < p.k)
    return fail("enumeration finds fewer than k stable matchings");
  return {};
}

}  // namespace srti

#endif  // SRTI_SEEDGEN_HPP
