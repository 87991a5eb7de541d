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

#ifndef SRTI_CORE_HPP
#define SRTI_CORE_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace srti {

/// Agents are numbered 1..n within an instance; 0 is never a valid agent.
using AgentId = std::uint32_t;

/// Sum of partner ranks over matched pairs (both directions).
using EgalCost = std::uint64_t;

/// Bad arguments or contradictory parameters supplied by a caller.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value violates a structural invariant (malformed matching, bad list).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An unordered pair, always stored with first < second.
struct AgentPair {
  AgentId first = 0;
  AgentId second = 0;

  AgentPair() = default;
  AgentPair(AgentId a, AgentId b)
      : first(std::min(a, b)), second(std::max(a, b)) {}

  friend auto operator<=>(const AgentPair&, const AgentPair&) = default;
  friend bool operator==(const AgentPair&, const AgentPair&) = default;
};

/// One agent's preferences as consecutive rank groups. Group i (0-based)
/// holds every agent of rank i + 1; a group with more than one member is a
/// tie. Members of a group are kept in ascending id order.
class PreferenceList {
 public:
  using Group = std::vector<AgentId>;

  PreferenceList() = default;
  explicit PreferenceList(std::vector<Group> groups) : groups_(std::move(groups)) {
    for (auto& g : groups_) std::sort(g.begin(), g.end());
    groups_.erase(std::remove_if(groups_.begin(), groups_.end(),
                                 [](const Group& g) { return g.empty(); }),
                  groups_.end());
  }
  PreferenceList(std::initializer_list<Group> groups)
      : PreferenceList(std::vector<Group>(groups)) {}

  [[nodiscard]] const std::vector<Group>& groups() const noexcept { return groups_; }
  [[nodiscard]] std::size_t group_count() const noexcept { return groups_.size(); }
  [[nodiscard]] bool empty() const noexcept { return groups_.empty(); }

  /// Number of listed agents.
  [[nodiscard]] std::size_t size() const noexcept {
    std::size_t total = 0;
    for (const auto& g : groups_) total += g.size();
    return total;
  }

  /// 1-based rank of `y`, or nullopt when `y` is not listed. Linear scan;
  /// Instance keeps a dense table for hot paths.
  [[nodiscard]] std::optional<std::uint32_t> rank_of(AgentId y) const noexcept {
    for (std::size_t i = 0; i < groups_.size(); ++i)
      if (std::binary_search(groups_[i].begin(), groups_[i].end(), y))
        return static_cast<std::uint32_t>(i + 1);
    return std::nullopt;
  }

  [[nodiscard]] bool contains(AgentId y) const noexcept { return rank_of(y).has_value(); }

  /// All listed agents in rank order (ascending id within a tie).
  [[nodiscard]] std::vector<AgentId> flatten() const {
    std::vector<AgentId> out;
    for (const auto& g : groups_) out.insert(out.end(), g.begin(), g.end());
    return out;
  }

  /// Appends `y` as a new, untied last rank group.
  void append_group(AgentId y) { groups_.push_back(Group{y}); }

  /// Adds `y` to the existing group at 0-based index `group`, forming a tie.
  void join_group(std::size_t group, AgentId y) {
    auto& g = groups_.at(group);
    g.insert(std::upper_bound(g.begin(), g.end(), y), y);
  }

  /// Removes `y` if present; an emptied group is dropped so ranks stay
  /// consecutive. Returns whether anything was removed.
  bool remove(AgentId y) {
    for (auto it = groups_.begin(); it != groups_.end(); ++it) {
      auto pos = std::lower_bound(it->begin(), it->end(), y);
      if (pos != it->end() && *pos == y) {
        it->erase(pos);
        if (it->empty()) groups_.erase(it);
        return true;
      }
    }
    return false;
  }

  friend bool operator==(const PreferenceList&, const PreferenceList&) = default;

 private:
  std::vector<Group> groups_;
};

/// An SRTI instance: n agents, a list-length bound m, and one preference
/// list per agent. Immutable once constructed; construction validates every
/// structural invariant and builds a dense rank table.
class Instance {
 public:
  Instance(std::size_t n, std::size_t m, std::vector<PreferenceList> lists)
      : n_(n), m_(m), lists_(std::move(lists)) {
    if (n_ < 2) throw ValidationError("instance needs at least 2 agents");
    if (m_ < 1 || m_ >= n_)
      throw ValidationError("max list length m must satisfy 0 < m < n (n=" +
                            std::to_string(n_) + ", m=" + std::to_string(m_) + ")");
    if (lists_.size() != n_)
      throw ValidationError("expected " + std::to_string(n_) + " preference lists, got " +
                            std::to_string(lists_.size()));
    ranks_.assign((n_ + 1) * (n_ + 1), 0);
    for (AgentId x = 1; x <= n_; ++x) {
      const auto& list = lists_[x - 1];
      if (list.size() > m_)
        throw ValidationError("agent " + std::to_string(x) + " lists " +
                              std::to_string(list.size()) + " agents, more than m=" +
                              std::to_string(m_));
      std::uint32_t r = 0;
      for (const auto& group : list.groups()) {
        ++r;
        for (AgentId y : group) {
          if (y < 1 || y > n_)
            throw ValidationError("agent " + std::to_string(x) + " lists out-of-range id " +
                                  std::to_string(y));
          if (y == x)
            throw ValidationError("agent " + std::to_string(x) + " lists itself");
          auto& slot = ranks_[x * (n_ + 1) + y];
          if (slot != 0)
            throw ValidationError("agent " + std::to_string(x) + " lists " +
                                  std::to_string(y) + " twice");
          slot = r;
        }
      }
    }
  }

  [[nodiscard]] std::size_t n() const noexcept { return n_; }
  [[nodiscard]] std::size_t m() const noexcept { return m_; }
  [[nodiscard]] const std::vector<PreferenceList>& lists() const noexcept { return lists_; }
  [[nodiscard]] const PreferenceList& list(AgentId x) const {
    check_id(x);
    return lists_[x - 1];
  }

  /// Rank of y in x's list, 0 when unlisted. No range checks.
  [[nodiscard]] std::uint32_t raw_rank(AgentId x, AgentId y) const noexcept {
    return ranks_[x * (n_ + 1) + y];
  }

  [[nodiscard]] bool raw_acceptable(AgentId x, AgentId y) const noexcept {
    return raw_rank(x, y) != 0 && raw_rank(y, x) != 0;
  }

  void check_id(AgentId x) const {
    if (x < 1 || x > n_)
      throw UsageError("agent id " + std::to_string(x) + " outside 1.." + std::to_string(n_));
  }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.n_ == b.n_ && a.m_ == b.m_ && a.lists_ == b.lists_;
  }

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<PreferenceList> lists_;
  std::vector<std::uint32_t> ranks_;
};

inline std::optional<std::uint32_t> rank(const Instance& inst, AgentId x, AgentId y) {
  inst.check_id(x);
  inst.check_id(y);
  if (x == y) throw UsageError("rank of an agent in its own list is undefined");
  const auto r = inst.raw_rank(x, y);
  if (r == 0) return std::nullopt;
  return r;
}

inline bool acceptable(const Instance& inst, AgentId x, AgentId y) {
  inst.check_id(x);
  inst.check_id(y);
  return x != y && inst.raw_acceptable(x, y);
}

/// Strict preference of `a` for `x` over `y`. A tie, or either agent being
/// unlisted, is not a preference.
inline bool prefers(const Instance& inst, AgentId a, AgentId x, AgentId y) {
  inst.check_id(a);
  inst.check_id(x);
  inst.check_id(y);
  const auto rx = inst.raw_rank(a, x);
  const auto ry = inst.raw_rank(a, y);
  return rx != 0 && ry != 0 && rx < ry;
}

/// A partition of 1..n into matched pairs and singles. Stored as a mate
/// table where 0 marks a single agent.
class Matching {
 public:
  /// Validates the partition property and mutual acceptability of every
  /// pair against `inst`.
  Matching(const Instance& inst, const std::vector<AgentPair>& pairs)
      : Matching(inst.n(), pairs) {
    for (const auto& p : pairs)
      if (!inst.raw_acceptable(p.first, p.second))
        throw ValidationError("pair (" + std::to_string(p.first) + " " +
                              std::to_string(p.second) + ") is not mutually acceptable");
  }

  /// All agents single.
  static Matching all_single(std::size_t n) { return Matching(n, {}); }

  /// Structural checks only; acceptability is the caller's concern.
  static Matching from_pairs(std::size_t n, const std::vector<AgentPair>& pairs) {
    return Matching(n, pairs);
  }

  /// `mates[a]` is a's partner or 0; index 0 is ignored. Must be symmetric.
  static Matching from_mates(std::vector<AgentId> mates) {
    Matching mu;
    mu.mates_ = std::move(mates);
    if (mu.mates_.empty()) mu.mates_.push_back(0);
    mu.mates_[0] = 0;
    const auto n = mu.mates_.size() - 1;
    for (AgentId a = 1; a <= n; ++a) {
      const AgentId b = mu.mates_[a];
      if (b == 0) continue;
      if (b > n || b == a || mu.mates_[b] != a)
        throw ValidationError("mate table is not a symmetric pairing at agent " +
                              std::to_string(a));
    }
    return mu;
  }

  [[nodiscard]] std::size_t n() const noexcept { return mates_.size() - 1; }
  [[nodiscard]] AgentId mate(AgentId a) const { return mates_.at(a); }
  [[nodiscard]] bool is_single(AgentId a) const { return mates_.at(a) == 0; }
  [[nodiscard]] const std::vector<AgentId>& mates() const noexcept { return mates_; }

  [[nodiscard]] std::vector<AgentPair> pairs() const {
    std::vector<AgentPair> out;
    for (AgentId a = 1; a < mates_.size(); ++a)
      if (mates_[a] > a) out.emplace_back(a, mates_[a]);
    return out;
  }

  [[nodiscard]] std::vector<AgentId> singles() const {
    std::vector<AgentId> out;
    for (AgentId a = 1; a < mates_.size(); ++a)
      if (mates_[a] == 0) out.push_back(a);
    return out;
  }

  friend auto operator<=>(const Matching&, const Matching&) = default;
  friend bool operator==(const Matching&, const Matching&) = default;

 private:
  Matching() = default;
  Matching(std::size_t n, const std::vector<AgentPair>& pairs) : mates_(n + 1, 0) {
    for (const auto& p : pairs) {
      if (p.first < 1 || p.second > n)
        throw ValidationError("pair (" + std::to_string(p.first) + " " +
                              std::to_string(p.second) + ") outside 1.." + std::to_string(n));
      if (p.first == p.second)
        throw ValidationError("agent " + std::to_string(p.first) + " paired with itself");
      for (AgentId a : {p.first, p.second})
        if (mates_[a] != 0)
          throw ValidationError("agent " + std::to_string(a) + " appears in two pairs");
      mates_[p.first] = p.second;
      mates_[p.second] = p.first;
    }
  }

  std::vector<AgentId> mates_;
};

namespace detail {

inline void require_compatible(const Instance& inst, const Matching& mu) {
  if (mu.n() != inst.n())
    throw ValidationError("matching covers " + std::to_string(mu.n()) +
                          " agents but the instance has " + std::to_string(inst.n()));
  for (AgentId a = 1; a <= inst.n(); ++a) {
    const AgentId b = mu.mate(a);
    if (b > a && !inst.raw_acceptable(a, b))
      throw ValidationError("pair (" + std::to_string(a) + " " + std::to_string(b) +
                            ") is not mutually acceptable");
  }
}

/// Whether `a` would rather be with `b` than in its current state: single,
/// or strictly prefers b to its partner. Assumes b is listed by a.
inline bool wants(const Instance& inst, const std::vector<AgentId>& mates, AgentId a,
                  AgentId b) noexcept {
  const AgentId p = mates[a];
  return p == 0 || inst.raw_rank(a, b) < inst.raw_rank(a, p);
}

}  // namespace detail

/// Every mutually acceptable, unmatched pair {x,y} where each side is single
/// or strictly prefers the other to its partner. Sorted ascending.
inline std::vector<AgentPair> blocking_pairs(const Instance& inst, const Matching& mu) {
  detail::require_compatible(inst, mu);
  std::vector<AgentPair> out;
  const auto& mates = mu.mates();
  for (AgentId x = 1; x <= inst.n(); ++x) {
    for (AgentId y = x + 1; y <= inst.n(); ++y) {
      if (mates[x] == y || !inst.raw_acceptable(x, y)) continue;
      if (detail::wants(inst, mates, x, y) && detail::wants(inst, mates, y, x))
        out.emplace_back(x, y);
    }
  }
  return out;
}

inline bool is_stable(const Instance& inst, const Matching& mu) {
  detail::require_compatible(inst, mu);
  const auto& mates = mu.mates();
  for (AgentId x = 1; x <= inst.n(); ++x)
    for (AgentId y = x + 1; y <= inst.n(); ++y)
      if (mates[x] != y && inst.raw_acceptable(x, y) && detail::wants(inst, mates, x, y) &&
          detail::wants(inst, mates, y, x))
        return false;
  return true;
}

/// Sum over matched pairs of rank(x,y) + rank(y,x). Singles contribute 0.
inline EgalCost egalitarian_cost(const Instance& inst, const Matching& mu) {
  detail::require_compatible(inst, mu);
  EgalCost cost = 0;
  for (const auto& p : mu.pairs())
    cost += inst.raw_rank(p.first, p.second) + inst.raw_rank(p.second, p.first);
  return cost;
}

}  // namespace srti

#endif  // SRTI_CORE_HPP
