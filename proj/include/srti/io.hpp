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

// Text formats.
//
// Instance (.srti):
//   agents <n> maxlen <m>
//   [flags: <free text>]
//   1: (g1a g1b ...) (g2a ...)
//   ...
//   n:
// Each parenthesised group is one rank group, best first. An empty list is
// just "<id>:". Serialization is canonical: single spaces, ascending ids
// inside groups, LF endings.
//
// Matching (.match):
//   pairs: (x y) (u v) ...
//   singles: a b ...
//
// Provenance (.srti.meta) is a JSON object; see make_seed_meta and
// make_combined_meta for the fields.

#ifndef SRTI_IO_HPP
#define SRTI_IO_HPP

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "srti/baseline.hpp"
#include "srti/combine.hpp"
#include "srti/core.hpp"
#include "srti/seedgen.hpp"

namespace srti {

class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos)
    lines.pop_back();
  return lines;
}

/// Minimal cursor over one line of text.
class LineCursor {
 public:
  LineCursor(std::string_view text, std::size_t line_no) : s_(text), line_(line_no) {}

  void skip_space() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= s_.size();
  }
  bool peek(char c) {
    skip_space();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void expect_word(std::string_view w) {
    skip_space();
    if (s_.substr(pos_, w.size()) != w) fail("expected '" + std::string(w) + "'");
    pos_ += w.size();
  }
  std::uint64_t number() {
    skip_space();
    std::uint64_t value = 0;
    const auto* begin = s_.data() + pos_;
    const auto* end = s_.data() + s_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

}  // namespace detail

inline std::string serialize_instance(const Instance& inst) {
  std::ostringstream out;
  out << "agents " << inst.n() << " maxlen " << inst.m() << '\n';
  for (AgentId x = 1; x <= inst.n(); ++x) {
    out << x << ':';
    for (const auto& g : inst.list(x).groups()) {
      out << " (";
      for (std::size_t i = 0; i < g.size(); ++i) out << (i ? " " : "") << g[i];
      out << ')';
    }
    out << '\n';
  }
  return out.str();
}

inline Instance parse_instance(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw ParseError(1, "empty document");
  detail::LineCursor head(lines[0], 1);
  head.expect_word("agents");
  const auto n = head.number();
  head.expect_word("maxlen");
  const auto m = head.number();
  if (!head.at_end()) head.fail("trailing text after header");
  if (n < 2) head.fail("need at least 2 agents");
  if (m < 1 || m >= n) head.fail("maxlen must satisfy 0 < m < n");

  std::size_t first = 1;
  if (lines.size() > 1 && lines[1].rfind("flags:", 0) == 0) first = 2;
  if (lines.size() - first != n)
    throw ParseError(lines.size() + 1, "expected " + std::to_string(n) + " agent lines, found " +
                                           std::to_string(lines.size() - first));

  std::vector<PreferenceList> lists;
  lists.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t line_no = first + i + 1;
    detail::LineCursor cur(lines[first + i], line_no);
    const auto id = cur.number();
    if (id != i + 1)
      cur.fail("expected agent " + std::to_string(i + 1) + ", found " + std::to_string(id));
    cur.expect(':');
    std::vector<PreferenceList::Group> groups;
    std::vector<bool> seen(n + 1, false);
    while (!cur.at_end()) {
      cur.expect('(');
      PreferenceList::Group g;
      while (!cur.peek(')')) {
        if (cur.at_end()) cur.fail("unterminated group");
        const auto y = cur.number();
        if (y < 1 || y > n) cur.fail("agent id " + std::to_string(y) + " out of range");
        if (y == id) cur.fail("agent lists itself");
        if (seen[y]) cur.fail("agent " + std::to_string(y) + " listed twice");
        seen[y] = true;
        g.push_back(static_cast<AgentId>(y));
      }
      cur.expect(')');
      if (g.empty()) cur.fail("empty rank group");
      groups.push_back(std::move(g));
    }
    PreferenceList list(std::move(groups));
    if (list.size() > m) cur.fail("list longer than maxlen");
    lists.push_back(std::move(list));
  }
  return Instance(n, m, std::move(lists));
}

inline std::string serialize_matching(const Matching& mu) {
  std::ostringstream out;
  out << "pairs:";
  for (const auto& p : mu.pairs()) out << " (" << p.first << ' ' << p.second << ')';
  out << "\nsingles:";
  for (AgentId a : mu.singles()) out << ' ' << a;
  out << '\n';
  return out.str();
}

/// Parses a matching over n agents. Pairs and singles must partition 1..n.
inline Matching parse_matching(std::string_view text, std::size_t n) {
  const auto lines = detail::split_lines(text);
  if (lines.size() != 2) throw ParseError(1, "expected a pairs line and a singles line");
  detail::LineCursor pairs_line(lines[0], 1);
  pairs_line.expect_word("pairs:");
  std::vector<AgentPair> pairs;
  std::vector<bool> seen(n + 1, false);
  const auto claim = [&](detail::LineCursor& cur, std::uint64_t a) {
    if (a < 1 || a > n) cur.fail("agent id " + std::to_string(a) + " out of range");
    if (seen[a]) cur.fail("agent " + std::to_string(a) + " repeated");
    seen[a] = true;
    return static_cast<AgentId>(a);
  };
  while (!pairs_line.at_end()) {
    pairs_line.expect('(');
    const auto a = claim(pairs_line, pairs_line.number());
    const auto b = claim(pairs_line, pairs_line.number());
    pairs_line.expect(')');
    pairs.emplace_back(a, b);
  }
  detail::LineCursor singles_line(lines[1], 2);
  singles_line.expect_word("singles:");
  while (!singles_line.at_end()) claim(singles_line, singles_line.number());
  for (std::size_t a = 1; a <= n; ++a)
    if (!seen[a]) singles_line.fail("agent " + std::to_string(a) + " missing");
  return Matching::from_pairs(n, pairs);
}

/// As above, additionally requiring every pair to be acceptable in `inst`.
inline Matching parse_matching(std::string_view text, const Instance& inst) {
  const auto mu = parse_matching(text, inst.n());
  return Matching(inst, mu.pairs());
}

// ---------------------------------------------------------------------------
// Provenance

using Json = nlohmann::json;

inline constexpr const char* kMetaFormat = "srti-meta/1";

inline std::string to_string(TieMode t) {
  switch (t) {
    case TieMode::forbid_ties: return "forbid";
    case TieMode::all_tied: return "all";
    default: return "any";
  }
}

inline TieMode tie_mode_from(const std::string& s) {
  if (s == "any") return TieMode::any;
  if (s == "forbid") return TieMode::forbid_ties;
  if (s == "all") return TieMode::all_tied;
  throw ValidationError("unknown tie mode '" + s + "'");
}

namespace detail {

inline Json witnesses_json(const std::vector<Matching>& witnesses) {
  Json arr = Json::array();
  for (const auto& mu : witnesses) {
    Json pairs = Json::array();
    for (const auto& p : mu.pairs()) pairs.push_back({p.first, p.second});
    arr.push_back(std::move(pairs));
  }
  return arr;
}

inline Json seed_record(const SeedInstance& s, AgentId offset) {
  Json rec = {
      {"n", s.instance.n()},
      {"m", s.instance.m()},
      {"k", s.witnesses.size()},
      {"offset", offset},
      {"complete", s.params.completeness == Completeness::complete},
      {"ties", to_string(s.params.ties)},
      {"symmetric", s.params.symmetric},
      {"witnesses", witnesses_json(s.witnesses)},
  };
  if (!s.classes.empty()) rec["classes"] = s.classes;
  return rec;
}

inline std::vector<Matching> witnesses_from(const Json& arr, std::size_t n) {
  std::vector<Matching> out;
  for (const auto& w : arr) {
    std::vector<AgentPair> pairs;
    for (const auto& p : w) {
      if (!p.is_array() || p.size() != 2) throw ValidationError("witness pair must be [x, y]");
      pairs.emplace_back(p[0].get<AgentId>(), p[1].get<AgentId>());
    }
    out.push_back(Matching::from_pairs(n, pairs));
  }
  return out;
}

inline SeedParams seed_params_from(const Json& rec) {
  SeedParams p;
  p.n = rec.at("n").get<std::size_t>();
  p.m = rec.at("m").get<std::size_t>();
  p.k = rec.at("k").get<std::size_t>();
  p.completeness = rec.value("complete", false) ? Completeness::complete : Completeness::any;
  p.ties = tie_mode_from(rec.value("ties", std::string("any")));
  p.symmetric = rec.value("symmetric", false);
  return p;
}

inline void require_format(const Json& meta) {
  if (!meta.is_object() || meta.value("format", std::string()) != kMetaFormat)
    throw ValidationError(std::string("provenance is not a ") + kMetaFormat + " document");
}

}  // namespace detail

inline Json make_seed_meta(const SeedInstance& seed, std::uint64_t attempts = 0) {
  return {
      {"format", kMetaFormat},
      {"generator", "seed"},
      {"params",
       {{"n", seed.params.n},
        {"m", seed.params.m},
        {"k", seed.params.k},
        {"complete", seed.params.completeness == Completeness::complete},
        {"ties", to_string(seed.params.ties)},
        {"symmetric", seed.params.symmetric},
        {"rng_seed", seed.params.rng_seed},
        {"attempt_budget", seed.params.attempt_budget},
        {"attempts", attempts}}},
      {"seeds", Json::array({detail::seed_record(seed, 0)})},
      {"lower_bound", seed.witnesses.size()},
  };
}

inline Json make_combined_meta(const CombinedInstance& combined, const CombineParams& params) {
  Json seeds = Json::array();
  for (const auto& b : combined.seeds) seeds.push_back(detail::seed_record(b.seed, b.offset));
  return {
      {"format", kMetaFormat},
      {"generator", "seed-combine"},
      {"params",
       {{"p1", params.p1},
        {"p2", params.p2},
        {"m_cap", combined.instance.m()},
        {"rng_seed", params.rng_seed},
        {"smti", params.smti_mode},
        {"symmetric", params.symmetric}}},
      {"seeds", std::move(seeds)},
      {"lower_bound", combined.lower_bound},
  };
}

inline Json make_er_meta(const ErParams& params) {
  return {
      {"format", kMetaFormat},
      {"generator", "er"},
      {"params", {{"n", params.n}, {"p", params.p}, {"rng_seed", params.rng_seed}}},
  };
}

inline std::string serialize_meta(const Json& meta) { return meta.dump(2) + "\n"; }

inline Json parse_meta(std::string_view text) {
  Json meta;
  try {
    meta = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("provenance is not valid JSON: ") + e.what());
  }
  detail::require_format(meta);
  return meta;
}

/// Rebuilds a seed from its instance and a generator=seed provenance record.
inline SeedInstance seed_from_meta(const Instance& inst, const Json& meta) {
  detail::require_format(meta);
  if (meta.value("generator", std::string()) != "seed")
    throw ValidationError("provenance does not describe a seed instance");
  const auto& seeds = meta.at("seeds");
  if (seeds.size() != 1) throw ValidationError("seed provenance must hold exactly one record");
  const auto& rec = seeds[0];
  auto params = detail::seed_params_from(rec);
  if (params.n != inst.n() || params.m != inst.m())
    throw ValidationError("provenance n/m disagree with the instance header");
  if (meta.contains("params")) params.rng_seed = meta["params"].value("rng_seed", std::uint64_t{0});
  SeedInstance seed{inst, detail::witnesses_from(rec.at("witnesses"), inst.n()), params, {}};
  if (rec.contains("classes")) seed.classes = rec["classes"].get<std::vector<std::uint8_t>>();
  return seed;
}

/// Rebuilds a combined instance from its provenance. Each seed's own lists
/// are recovered by restricting the combined lists to the seed's agents:
/// cross-seed additions only ever join existing groups or open new ones, so
/// the restriction is the original seed list.
inline CombinedInstance combined_from_meta(const Instance& inst, const Json& meta) {
  detail::require_format(meta);
  if (meta.value("generator", std::string()) != "seed-combine")
    throw ValidationError("provenance does not describe a combined instance");
  CombinedInstance combined{inst, {}, meta.at("lower_bound").get<std::uint64_t>(),
                            meta.at("params").value("rng_seed", std::uint64_t{0})};
  std::uint64_t product = 1;
  AgentId expected_offset = 0;
  for (const auto& rec : meta.at("seeds")) {
    auto params = detail::seed_params_from(rec);
    const auto offset = rec.at("offset").get<AgentId>();
    if (offset != expected_offset) throw ValidationError("seed blocks are not contiguous");
    if (offset + params.n > inst.n()) throw ValidationError("seed block exceeds agent range");
    std::vector<PreferenceList> lists;
    for (AgentId a = 1; a <= params.n; ++a) {
      std::vector<PreferenceList::Group> groups;
      for (const auto& g : inst.list(a + offset).groups()) {
        PreferenceList::Group local;
        for (AgentId b : g)
          if (b > offset && b <= offset + params.n) local.push_back(b - offset);
        groups.push_back(std::move(local));
      }
      lists.emplace_back(std::move(groups));
    }
    Instance local(params.n, params.m, std::move(lists));
    auto witnesses = detail::witnesses_from(rec.at("witnesses"), params.n);
    if (witnesses.size() != params.k) throw ValidationError("seed k disagrees with its witnesses");
    SeedInstance seed{std::move(local), {}, params, {}};
    if (rec.contains("classes")) seed.classes = rec["classes"].get<std::vector<std::uint8_t>>();
    seed.witnesses = std::move(witnesses);
    SeedBlock block{offset, seed, {}};
    for (const auto& mu : seed.witnesses) {
      std::vector<AgentId> mates(inst.n() + 1, 0);
      for (AgentId a = 1; a <= params.n; ++a)
        if (mu.mate(a) != 0) mates[a + offset] = mu.mate(a) + offset;
      block.witnesses.push_back(Matching::from_mates(std::move(mates)));
    }
    product *= params.k;
    combined.seeds.push_back(std::move(block));
    expected_offset = offset + static_cast<AgentId>(params.n);
  }
  if (expected_offset != inst.n()) throw ValidationError("seed blocks do not cover every agent");
  if (product != combined.lower_bound)
    throw ValidationError("lower_bound " + std::to_string(combined.lower_bound) +
                          " is not the product of the seed k values (" + std::to_string(product) +
                          ")");
  return combined;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
  if (!out) throw UsageError("write failed for " + path);
}

inline std::string meta_path(const std::string& instance_path) { return instance_path + ".meta"; }

}  // namespace srti

#endif  // SRTI_IO_HPP
