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

// Exhaustive enumeration of stable matchings by depth-first backtracking.
//
// Agents are decided in ascending id order. The lowest undecided agent is
// either left single or paired with an undecided, mutually acceptable agent
// (candidates in ascending rank, then ascending id). Every time agents become
// decided they are checked against all previously decided agents, and the
// branch is cut as soon as a pair of decided agents blocks. A complete
// assignment reached this way has no blocking pair at all, so every leaf is a
// stable matching.

#ifndef SRTI_ENUMERATE_HPP
#define SRTI_ENUMERATE_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "srti/core.hpp"

namespace srti {

using TimeLimit = std::chrono::steady_clock::duration;

/// Default wall-clock budget for enumeration and egalitarian search.
inline constexpr TimeLimit kDefaultTimeLimit = std::chrono::seconds(200);

inline constexpr std::uint64_t kUnlimited = std::numeric_limits<std::uint64_t>::max();

struct EnumResult {
  std::vector<Matching> matchings;
  std::uint64_t count = 0;
  bool exhausted = false;  // false iff the cap or the time limit cut the search
  std::uint64_t nodes = 0;
};

struct CountResult {
  std::uint64_t count = 0;
  bool exhausted = false;
  std::uint64_t nodes = 0;
};

struct EgalResult {
  std::optional<Matching> matching;  // absent if unsatisfiable or timed out
  EgalCost cost = 0;
  bool timed_out = false;
  std::uint64_t nodes = 0;
};

namespace detail {

inline constexpr AgentId kUndecided = std::numeric_limits<AgentId>::max();

/// Backtracking engine shared by enumeration, counting and the egalitarian
/// branch and bound. `Visitor` provides
///   bool leaf(const std::vector<AgentId>& mates, EgalCost cost)  // false stops
///   bool prune(EgalCost partial_cost)                            // true cuts
template <typename Visitor>
class StableSearch {
 public:
  StableSearch(const Instance& inst, Visitor& visitor, TimeLimit limit)
      : inst_(inst),
        visitor_(visitor),
        n_(inst.n()),
        mates_(inst.n() + 1, kUndecided),
        candidates_(inst.n() + 1),
        neighbours_(inst.n() + 1),
        deadline_(std::chrono::steady_clock::now() + limit) {
    mates_[0] = 0;
    for (AgentId x = 1; x <= n_; ++x) {
      for (AgentId y = 1; y <= n_; ++y) {
        if (x == y || !inst.raw_acceptable(x, y)) continue;
        neighbours_[x].push_back(y);
        if (y > x) candidates_[x].push_back(y);
      }
      std::stable_sort(candidates_[x].begin(), candidates_[x].end(),
                       [&](AgentId a, AgentId b) {
                         return inst.raw_rank(x, a) < inst.raw_rank(x, b);
                       });
    }
  }

  /// Runs the search. Returns false if it stopped early (visitor or clock).
  bool run() {
    stopped_ = false;
    timed_out_ = false;
    descend(1, 0);
    return !stopped_;
  }

  [[nodiscard]] bool timed_out() const noexcept { return timed_out_; }
  [[nodiscard]] std::uint64_t nodes() const noexcept { return nodes_; }

 private:
  // True if decided agent `a` forms a blocking pair with some other decided
  // agent.
  bool conflicts(AgentId a) const {
    for (AgentId b : neighbours_[a]) {
      const AgentId mb = mates_[b];
      if (mb == kUndecided || mates_[a] == b) continue;
      if (wants(a, b) && wants(b, a)) return true;
    }
    return false;
  }

  bool wants(AgentId a, AgentId b) const {
    const AgentId p = mates_[a];
    return p == 0 || inst_.raw_rank(a, b) < inst_.raw_rank(a, p);
  }

  bool out_of_time() {
    if ((nodes_ & 0xfff) == 1 && std::chrono::steady_clock::now() >= deadline_) {
      timed_out_ = true;
      stopped_ = true;
    }
    return stopped_;
  }

  void descend(AgentId from, EgalCost cost) {
    ++nodes_;
    if (out_of_time()) return;
    AgentId i = from;
    while (i <= n_ && mates_[i] != kUndecided) ++i;
    if (i > n_) {
      if (!visitor_.leaf(mates_, cost)) stopped_ = true;
      return;
    }

    mates_[i] = 0;
    if (!conflicts(i)) descend(i + 1, cost);
    mates_[i] = kUndecided;
    if (stopped_) return;

    for (AgentId j : candidates_[i]) {
      if (mates_[j] != kUndecided) continue;
      const EgalCost next = cost + inst_.raw_rank(i, j) + inst_.raw_rank(j, i);
      if (visitor_.prune(next)) continue;
      mates_[i] = j;
      mates_[j] = i;
      if (!conflicts(i) && !conflicts(j)) descend(i + 1, next);
      mates_[i] = kUndecided;
      mates_[j] = kUndecided;
      if (stopped_) return;
    }
  }

  const Instance& inst_;
  Visitor& visitor_;
  std::size_t n_;
  std::vector<AgentId> mates_;
  std::vector<std::vector<AgentId>> candidates_;
  std::vector<std::vector<AgentId>> neighbours_;
  std::chrono::steady_clock::time_point deadline_;
  std::uint64_t nodes_ = 0;
  bool stopped_ = false;
  bool timed_out_ = false;
};

struct CollectVisitor {
  std::uint64_t cap;
  bool keep;
  std::uint64_t count = 0;
  std::vector<Matching> found;

  bool leaf(const std::vector<AgentId>& mates, EgalCost) {
    ++count;
    if (keep) found.push_back(Matching::from_mates(mates));
    return count < cap;
  }
  bool prune(EgalCost) const { return false; }
};

struct EgalVisitor {
  std::optional<std::vector<AgentId>> best;
  EgalCost best_cost = std::numeric_limits<EgalCost>::max();

  bool leaf(const std::vector<AgentId>& mates, EgalCost cost) {
    if (cost < best_cost) {
      best_cost = cost;
      best = mates;
    }
    return true;
  }
  // Partial cost only grows, so a branch that already matches the incumbent
  // cannot improve on it.
  bool prune(EgalCost partial) const { return best && partial >= best_cost; }
};

inline void require_cap(std::uint64_t cap) {
  if (cap < 1) throw UsageError("enumeration cap must be at least 1");
}

}  // namespace detail

/// All stable matchings of `inst`, up to `cap`, in deterministic search
/// order.
inline EnumResult enumerate_stable(const Instance& inst, std::uint64_t cap = kUnlimited,
                                   TimeLimit limit = kDefaultTimeLimit) {
  detail::require_cap(cap);
  detail::CollectVisitor visitor{cap, true, 0, {}};
  detail::StableSearch search(inst, visitor, limit);
  const bool complete = search.run();
  return {std::move(visitor.found), visitor.count, complete, search.nodes()};
}

/// As enumerate_stable but only counts.
inline CountResult count_stable(const Instance& inst, std::uint64_t cap = kUnlimited,
                                TimeLimit limit = kDefaultTimeLimit) {
  detail::require_cap(cap);
  detail::CollectVisitor visitor{cap, false, 0, {}};
  detail::StableSearch search(inst, visitor, limit);
  const bool complete = search.run();
  return {visitor.count, complete, search.nodes()};
}

/// A stable matching of minimum egalitarian cost, found by branch and bound
/// on the partial rank sum. Among equal-cost optima the first in search
/// order wins.
inline EgalResult solve_egalitarian(const Instance& inst, TimeLimit limit = kDefaultTimeLimit) {
  detail::EgalVisitor visitor;
  detail::StableSearch search(inst, visitor, limit);
  search.run();
  EgalResult result;
  result.nodes = search.nodes();
  if (search.timed_out()) {
    result.timed_out = true;
    return result;
  }
  if (visitor.best) {
    result.matching = Matching::from_mates(*visitor.best);
    result.cost = visitor.best_cost;
  }
  return result;
}

}  // namespace srti

#endif  // SRTI_ENUMERATE_HPP
