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

// Acceptance checks. Prints one PASS or FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <array>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "test_support.hpp"

namespace srti {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Outcome fail(const std::string& why) { return {false, why}; }

// 1. Exact enumeration of the three worked example instances.
Outcome worked_example() {
  const auto t0 = Clock::now();
  using testing::PairSet;
  const std::array<std::pair<const char*, std::set<PairSet>>, 3> cases{{
      {"seed_a.srti", {{{1, 4}}, {{2, 4}}}},
      {"seed_b.srti", {{{3, 5}}, {{2, 5}}, {{1, 5}}}},
      {"combined_ab.srti",
       {{{1, 4}, {7, 9}}, {{1, 4}, {6, 9}}, {{1, 4}, {5, 9}}, {{2, 4}, {7, 9}},
        {{2, 4}, {6, 9}}, {{2, 4}, {5, 9}}, {{2, 4}, {3, 9}}, {{1, 4}, {3, 9}}}},
  }};
  std::ostringstream counts;
  for (const auto& [name, expected] : cases) {
    const auto r = enumerate_stable(testing::load_fixture(name));
    counts << r.count << ' ';
    if (!r.exhausted || r.count != expected.size() || testing::pair_sets(r.matchings) != expected)
      return fail(std::string(name) + " does not match the listed matchings");
  }
  const double secs = seconds_since(t0);
  if (secs >= 1.0) return fail("took " + std::to_string(secs) + " s");
  return {true, "counts " + counts.str() + "in " + std::to_string(secs) + " s"};
}

std::optional<SeedInstance> random_seed(std::mt19937_64& gen) {
  SeedParams p;
  p.n = std::uniform_int_distribution<std::size_t>(3, 8)(gen);
  p.m = std::uniform_int_distribution<std::size_t>(1, p.n - 1)(gen);
  p.k = std::uniform_int_distribution<std::size_t>(1, 4)(gen);
  p.ties = static_cast<TieMode>(gen() % 3);
  p.rng_seed = gen();
  p.attempt_budget = 20000;
  return generate_seed(p).seed;
}

// 2. Every union of seed witnesses stays stable after combining.
Outcome preservation() {
  std::mt19937_64 gen(20240611);
  const std::array<double, 5> ps{0.0, 0.25, 0.5, 0.75, 1.0};
  int trials = 0;
  int redraws = 0;
  while (trials < 250) {
    std::vector<SeedInstance> seeds;
    const std::size_t want = 2 + gen() % 2;
    std::size_t total = 0;
    std::size_t longest = 0;
    while (seeds.size() < want) {
      auto s = random_seed(gen);
      if (!s) {
        ++redraws;  // parameter draw with no seed in budget, e.g. k=4 with m=1
        continue;
      }
      total += s->instance.n();
      longest = std::max(longest, s->instance.m());
      seeds.push_back(std::move(*s));
    }
    CombineParams params;
    params.p1 = ps[gen() % ps.size()];
    params.p2 = ps[gen() % ps.size()];
    params.m_cap = std::uniform_int_distribution<std::size_t>(longest, total - 1)(gen);
    params.rng_seed = gen();
    params.symmetric = gen() % 4 == 0;
    const auto c = combine(seeds, params);
    if (!verify_preservation(c).ok)
      return fail("trial " + std::to_string(trials) + " broke a witness union");
    ++trials;
  }
  return {true, std::to_string(trials) + " trials, " + std::to_string(redraws) +
                    " seed parameter redraws"};
}

// 3. Pipeline instances carry at least the certified number of matchings.
Outcome recipe_counts() {
  std::ostringstream detail;
  for (const std::size_t n_total : {20u, 40u}) {
    const auto t0 = Clock::now();
    PipelineSpec spec;
    spec.n_total = n_total;
    spec.rng_seed = 1;
    const auto item = run_pipeline_item(spec, 0);
    if (!item.combined) return fail(item.failure);
    const std::uint64_t expected = n_total == 20 ? 72 : 5184;
    if (item.combined->lower_bound != expected)
      return fail("lower_bound " + std::to_string(item.combined->lower_bound));
    const auto r = count_stable(item.combined->instance);
    if (!r.exhausted) return fail("n_total " + std::to_string(n_total) + " did not finish");
    if (r.count < expected)
      return fail("n_total " + std::to_string(n_total) + " counted " + std::to_string(r.count));
    detail << "n_total " << n_total << ": " << r.count << " >= " << expected << " ("
           << seconds_since(t0) << " s); ";
  }
  for (const std::size_t n_total : {80u, 100u}) {
    PipelineSpec spec;
    spec.n_total = n_total;
    const auto params = pipeline_seed_params(spec, 0);
    std::uint64_t bound = 1;
    for (const auto& p : params) bound *= p.k;
    std::uint64_t expected = 1;
    for (std::size_t b = 0; b < n_total / 20; ++b) expected *= 72;
    if (bound != expected) return fail("certificate for n_total " + std::to_string(n_total));
    detail << "n_total " << n_total << " certificate " << bound << "; ";
  }
  return {true, detail.str()};
}

// 4. Enumeration and blocking pairs agree with brute force.
Outcome oracle_equivalence() {
  std::mt19937_64 gen(99);
  const int instances = 600;
  int unsatisfiable = 0;
  for (int i = 0; i < instances; ++i) {
    const auto inst = testing::random_mixed_instance(gen, 8);
    const auto r = enumerate_stable(inst);
    if (!r.exhausted || testing::pair_sets(r.matchings) != testing::oracle_stable_matchings(inst) ||
        r.count != r.matchings.size())
      return fail("enumeration mismatch on instance " + std::to_string(i));
    if (r.count == 0) ++unsatisfiable;
    const auto mu = testing::random_matching(inst, gen);
    testing::PairSet got;
    for (const auto& p : blocking_pairs(inst, mu)) got.emplace(p.first, p.second);
    if (got != testing::oracle_blocking(inst, mu.mates()))
      return fail("blocking pair mismatch on instance " + std::to_string(i));
  }
  return {true, std::to_string(instances) + " instances, " + std::to_string(unsatisfiable) +
                    " unsatisfiable"};
}

// 5. Seeds validate, and the recipe shapes are found reliably.
Outcome seed_soundness() {
  std::ostringstream detail;
  for (const auto& [n, k] : {std::pair<std::size_t, std::size_t>{8, 6}, {6, 2}}) {
    int found = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
      SeedParams p;
      p.n = n;
      p.m = n - 1;
      p.k = k;
      p.completeness = Completeness::complete;
      p.ties = TieMode::forbid_ties;
      p.rng_seed = 1000 + s;
      const auto r = generate_seed(p);
      if (!r.seed) continue;
      const auto check = validate_seed(*r.seed);
      if (!check.ok) return fail("seed failed validation: " + check.diagnostic);
      ++found;
    }
    if (found < 45)
      return fail("(" + std::to_string(n) + "," + std::to_string(n - 1) + "," + std::to_string(k) +
                  ") found " + std::to_string(found) + "/50");
    detail << "(" << n << "," << n - 1 << "," << k << ") " << found << "/50; ";
  }
  std::mt19937_64 gen(5);
  for (int i = 0; i < 100; ++i) {
    const auto s = random_seed(gen);
    if (s && !validate_seed(*s).ok) return fail("random seed failed validation");
  }
  return {true, detail.str()};
}

// 6. The egalitarian optimum equals the best enumerated cost.
Outcome egalitarian() {
  const auto seed_b = solve_egalitarian(testing::load_fixture("seed_b.srti"));
  if (!seed_b.matching || seed_b.cost != 2) return fail("seed_b cost is not 2");
  std::mt19937_64 gen(17);
  int checked = 0;
  int unsatisfiable = 0;
  std::vector<Instance> pool;
  for (int i = 0; i < 300; ++i) pool.push_back(testing::random_mixed_instance(gen, 10));
  pool.push_back(testing::load_fixture("combined_ab.srti"));
  PipelineSpec spec;
  spec.p1 = 0.3;
  spec.p2 = 0.3;
  for (std::size_t i = 0; i < 3; ++i)
    if (auto item = run_pipeline_item(spec, i); item.combined)
      pool.push_back(item.combined->instance);
  for (const auto& inst : pool) {
    const auto r = enumerate_stable(inst, kUnlimited, std::chrono::seconds(20));
    if (!r.exhausted) continue;
    const auto e = solve_egalitarian(inst);
    if (r.count == 0) {
      if (e.matching) return fail("optimum reported for an unsatisfiable instance");
      ++unsatisfiable;
      continue;
    }
    EgalCost best = std::numeric_limits<EgalCost>::max();
    for (const auto& mu : r.matchings) best = std::min(best, egalitarian_cost(inst, mu));
    if (!e.matching || e.cost != best || egalitarian_cost(inst, *e.matching) != best ||
        !is_stable(inst, *e.matching))
      return fail("egalitarian mismatch");
    ++checked;
  }
  return {true, std::to_string(checked) + " satisfiable and " + std::to_string(unsatisfiable) +
                    " unsatisfiable instances checked"};
}

// 7. Random complete instances are satisfiable at a plausible rate.
Outcome baseline_sanity() {
  int satisfiable = 0;
  const int samples = 200;
  for (int s = 0; s < samples; ++s)
    if (count_stable(generate_er({20, 1.0, static_cast<std::uint64_t>(s)}), 1).count > 0)
      ++satisfiable;
  const double frac = static_cast<double>(satisfiable) / samples;
  const std::string detail = "satisfiable fraction " + std::to_string(frac);
  if (frac < 0.50 || frac > 0.95) return fail(detail);
  return {true, detail};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SRTI_CLI) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

// 8. Identical flags give identical bytes.
Outcome determinism() {
  const auto root = fs::temp_directory_path() / "srti_acceptance_determinism";
  fs::remove_all(root);
  const std::string fixtures = testing::data_path("seed_a.srti") + " " +
                               testing::data_path("seed_b.srti");
  std::vector<std::string> files;
  for (const char* run : {"a", "b"}) {
    const auto dir = root / run;
    fs::create_directories(dir);
    const auto d = dir.string();
    const std::array<std::string, 4> commands{
        "pipeline --n-total 40 --p1 0.3 --p2 0.2 --instances 2 --seed 8 --jobs 2 --out-dir " + d +
            "/bench",
        "gen-seed -n 8 -m 7 -k 6 --seed 4 -o " + d + "/seed.srti",
        "combine " + fixtures + " --p1 0.5 --p2 0.5 --seed 6 -o " + d + "/combined.srti",
        "baseline -n 20 -p 0.5 --seed 2 -o " + d + "/er.srti",
    };
    for (const auto& c : commands)
      if (run_cli(c) != 0) return fail("command failed: " + c);
  }
  int compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto other = root / "b" / fs::relative(entry.path(), root / "a");
    if (!fs::exists(other) || read_file(entry.path().string()) != read_file(other.string()))
      return fail("differs: " + fs::relative(entry.path(), root / "a").string());
    ++compared;
  }
  fs::remove_all(root);
  if (compared < 10) return fail("only " + std::to_string(compared) + " files produced");
  return {true, std::to_string(compared) + " files byte-identical"};
}

}  // namespace
}  // namespace srti

int main() {
  using namespace srti;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 worked example enumeration", worked_example},
      {"2 witness unions preserved", preservation},
      {"3 recipe counts reach the lower bound", recipe_counts},
      {"4 oracle equivalence", oracle_equivalence},
      {"5 seed soundness", seed_soundness},
      {"6 egalitarian consistency", egalitarian},
      {"7 baseline satisfiability rate", baseline_sanity},
      {"8 deterministic outputs", determinism},
  };
  bool all = true;
  for (const auto& [name, check] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    all = all && o.ok;
    std::cout << (o.ok ? "PASS" : "FAIL") << "  criterion " << name << "  [" << o.detail << "] ("
              << seconds_since(t0) << " s)" << std::endl;
  }
  return all ? 0 : 1;
}
