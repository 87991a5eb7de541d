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

// srti: generate, combine, enumerate and verify SRTI benchmark instances.
//
// Exit codes: 0 success, 2 usage, 3 budget or time limit reached,
// 4 validation failure.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "srti/srti.hpp"

namespace fs = std::filesystem;
using namespace srti;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;
constexpr int kExitInvalid = 4;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SRTI_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("SRTI_SEED must be an unsigned integer");
    }
  }
  return 0;
}

TimeLimit seconds(double s) {
  return std::chrono::duration_cast<TimeLimit>(std::chrono::duration<double>(s));
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Prints a report either as "key: value" lines or as one JSON object.
void emit(const Json& report, bool json) {
  if (json) {
    std::cout << report.dump(2) << '\n';
    return;
  }
  for (const auto& [key, value] : report.items()) {
    if (value.is_string())
      std::cout << key << ": " << value.get<std::string>() << '\n';
    else
      std::cout << key << ": " << value.dump() << '\n';
  }
}

void write_instance_files(const std::string& path, const Instance& inst, const Json& meta) {
  if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
  write_file(path, serialize_instance(inst));
  write_file(meta_path(path), serialize_meta(meta));
}

Instance load_instance(const std::string& path) { return parse_instance(read_file(path)); }

std::optional<Json> load_meta(const std::string& instance_path) {
  const auto mp = meta_path(instance_path);
  if (!fs::exists(mp)) return std::nullopt;
  return parse_meta(read_file(mp));
}

// ---------------------------------------------------------------------------

struct GenSeedOptions {
  std::size_t n = 0, m = 0, k = 1;
  bool complete = false, no_ties = false, all_tied = false, symmetric = false;
  std::uint64_t seed = 0;
  std::uint64_t budget = kDefaultAttemptBudget;
  std::string out;
};

int cmd_gen_seed(const GenSeedOptions& o) {
  if (o.no_ties && o.all_tied) throw UsageError("--no-ties and --all-tied are contradictory");
  SeedParams p;
  p.n = o.n;
  p.m = o.m;
  p.k = o.k;
  p.completeness = o.complete ? Completeness::complete : Completeness::any;
  p.ties = o.no_ties ? TieMode::forbid_ties : o.all_tied ? TieMode::all_tied : TieMode::any;
  p.symmetric = o.symmetric;
  p.rng_seed = o.seed;
  p.attempt_budget = o.budget;
  const auto t0 = std::chrono::steady_clock::now();
  auto result = generate_seed(p);
  if (!result.seed) {
    emit({{"status", "budget_exhausted"}, {"attempts", result.attempts}}, false);
    return kExitBudget;
  }
  write_instance_files(o.out, result.seed->instance, make_seed_meta(*result.seed, result.attempts));
  emit({{"status", "ok"},
        {"output", o.out},
        {"attempts", result.attempts},
        {"k", result.seed->witnesses.size()},
        {"time", elapsed_since(t0)}},
       false);
  return kExitOk;
}

struct CombineOptions {
  std::vector<std::string> inputs;
  double p1 = 0.0, p2 = 0.0;
  std::size_t m_cap = 0;
  std::uint64_t seed = 0;
  bool smti = false, symmetric = false;
  std::string out;
};

int cmd_combine(const CombineOptions& o) {
  std::vector<SeedInstance> seeds;
  for (const auto& path : o.inputs) {
    const auto inst = load_instance(path);
    const auto meta = load_meta(path);
    if (!meta) throw ValidationError(path + ": missing provenance file " + meta_path(path));
    auto seed = seed_from_meta(inst, *meta);
    if (const auto check = validate_seed(seed); !check.ok)
      throw ValidationError(path + ": " + check.diagnostic);
    seeds.push_back(std::move(seed));
  }
  CombineParams params;
  params.p1 = o.p1;
  params.p2 = o.p2;
  if (o.m_cap > 0) params.m_cap = o.m_cap;
  params.rng_seed = o.seed;
  params.smti_mode = o.smti;
  params.symmetric = o.symmetric;
  const auto combined = combine(seeds, params);
  write_instance_files(o.out, combined.instance, make_combined_meta(combined, params));
  emit({{"status", "ok"},
        {"output", o.out},
        {"agents", combined.instance.n()},
        {"lower_bound", combined.lower_bound}},
       false);
  return kExitOk;
}

struct PipelineOptions {
  PipelineSpec spec;
  std::string out_dir;
  std::size_t jobs = 1;
  std::size_t m_cap = 0;
};

int cmd_pipeline(PipelineOptions o) {
  if (o.m_cap > 0) o.spec.m_cap = o.m_cap;
  pipeline_seed_params(o.spec, 0);  // validates n_total
  fs::create_directories(o.out_dir);
  std::vector<PipelineItem> items(o.spec.instances);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string error;
  const auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      try {
        items[i] = run_pipeline_item(o.spec, i);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        error = e.what();
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < std::max<std::size_t>(1, o.jobs); ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (!error.empty()) throw UsageError(error);

  int rc = kExitOk;
  for (std::size_t i = 0; i < items.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "instance_%03zu.srti", i);
    const auto path = (fs::path(o.out_dir) / name).string();
    const auto& item = items[i];
    if (!item.combined) {
      std::cout << name << ": " << item.failure << '\n';
      rc = kExitBudget;
      continue;
    }
    write_instance_files(path, item.combined->instance,
                         make_combined_meta(*item.combined, item.params));
    std::cout << name << ": agents " << item.combined->instance.n() << " lower_bound "
              << item.combined->lower_bound << '\n';
  }
  return rc;
}

struct SearchOptions {
  std::string input;
  std::uint64_t cap = kUnlimited;
  double time_limit = 200.0;
  bool json = false;
  bool print = false;
};

int cmd_enumerate(const SearchOptions& o, bool keep) {
  const auto inst = load_instance(o.input);
  const auto t0 = std::chrono::steady_clock::now();
  Json report = {{"input", o.input}};
  bool exhausted = false;
  bool timed_out = false;
  if (keep) {
    const auto r = enumerate_stable(inst, o.cap, seconds(o.time_limit));
    exhausted = r.exhausted;
    timed_out = !r.exhausted && r.count < o.cap;
    report["count"] = r.count;
    report["nodes"] = r.nodes;
    if (o.print || o.json) {
      Json list = Json::array();
      for (const auto& mu : r.matchings) list.push_back(serialize_matching(mu));
      if (o.json)
        report["matchings"] = list;
      else
        for (const auto& mu : r.matchings) std::cout << serialize_matching(mu) << '\n';
    }
  } else {
    const auto r = count_stable(inst, o.cap, seconds(o.time_limit));
    exhausted = r.exhausted;
    timed_out = !r.exhausted && r.count < o.cap;
    report["count"] = r.count;
    report["nodes"] = r.nodes;
  }
  report["exhausted"] = exhausted;
  report["satisfiable"] = report["count"].get<std::uint64_t>() > 0
                              ? Json("yes")
                              : (exhausted ? Json("no") : Json("unknown"));
  report["time"] = elapsed_since(t0);
  emit(report, o.json);
  return timed_out ? kExitBudget : kExitOk;
}

int cmd_solve_egal(const SearchOptions& o, const std::string& out) {
  const auto inst = load_instance(o.input);
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = solve_egalitarian(inst, seconds(o.time_limit));
  Json report = {{"input", o.input}, {"nodes", r.nodes}};
  if (r.timed_out) {
    report["status"] = "timeout";
  } else if (!r.matching) {
    report["status"] = "unsatisfiable";
  } else {
    report["status"] = "optimal";
    report["cost"] = r.cost;
    report["matching"] = serialize_matching(*r.matching);
    if (!out.empty()) write_file(out, serialize_matching(*r.matching));
  }
  report["time"] = elapsed_since(t0);
  if (!o.json && r.matching) {
    report.erase("matching");
    emit(report, false);
    std::cout << serialize_matching(*r.matching);
  } else {
    emit(report, o.json);
  }
  return r.timed_out ? kExitBudget : kExitOk;
}

struct VerifyOptions {
  std::string input;
  std::string matching;
  std::uint64_t bound = kDefaultPreservationBound;
  bool json = false;
};

int cmd_verify(const VerifyOptions& o) {
  const auto inst = load_instance(o.input);
  Json report = {{"input", o.input}, {"agents", inst.n()}};
  bool ok = true;

  if (!o.matching.empty()) {
    const auto mu = parse_matching(read_file(o.matching), inst);
    const auto blocks = blocking_pairs(inst, mu);
    report["matching"] = o.matching;
    report["stable"] = blocks.empty();
    report["egalitarian_cost"] = egalitarian_cost(inst, mu);
    if (!blocks.empty()) {
      report["blocking_pair"] = {blocks.front().first, blocks.front().second};
      ok = false;
    }
  }

  const auto meta = load_meta(o.input);
  if (!meta) {
    report["kind"] = "instance";
  } else {
    const auto kind = meta->value("generator", std::string());
    report["kind"] = kind;
    if (kind == "seed") {
      const auto check = validate_seed(seed_from_meta(inst, *meta));
      report["seed_valid"] = check.ok;
      if (!check.ok) {
        report["diagnostic"] = check.diagnostic;
        ok = false;
      }
    } else if (kind == "seed-combine") {
      const auto combined = combined_from_meta(inst, *meta);
      report["lower_bound"] = combined.lower_bound;
      for (const auto& block : combined.seeds) {
        // Seeds are recovered from the combined lists, so this also checks
        // that each seed's structure survived combining.
        const auto check = validate_seed(block.seed);
        if (!check.ok) {
          report["diagnostic"] = "seed at offset " + std::to_string(block.offset) + ": " +
                                 check.diagnostic;
          ok = false;
          break;
        }
      }
      const auto pres = verify_preservation(combined, o.bound);
      report["preserved"] = pres.ok;
      if (!pres.ok) {
        report["counterexample"] = serialize_matching(*pres.counterexample);
        ok = false;
      }
    } else if (kind != "er") {
      throw ValidationError("unknown generator kind '" + kind + "'");
    }
  }
  report["valid"] = ok;
  emit(report, o.json);
  return ok ? kExitOk : kExitInvalid;
}

struct BaselineOptions {
  std::size_t n = 0;
  double p = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_baseline(const BaselineOptions& o) {
  ErParams params{o.n, o.p, o.seed};
  const auto inst = generate_er(params);
  write_instance_files(o.out, inst, make_er_meta(params));
  emit({{"status", "ok"}, {"output", o.out}, {"agents", inst.n()}}, false);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate and verify stable roommates benchmark instances with ties"};
  app.require_subcommand(1);

  std::uint64_t env_seed = 0;
  try {
    env_seed = default_seed();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  GenSeedOptions gen;
  gen.seed = env_seed;
  auto* gen_cmd = app.add_subcommand("gen-seed", "Generate an (n,m,k)-seed instance");
  gen_cmd->add_option("-n", gen.n, "Number of agents")->required();
  gen_cmd->add_option("-m", gen.m, "Maximum list length")->required();
  gen_cmd->add_option("-k", gen.k, "Number of witness stable matchings")->required();
  gen_cmd->add_flag("--complete", gen.complete, "Every list holds all n-1 other agents");
  gen_cmd->add_flag("--no-ties", gen.no_ties, "Strict lists only");
  gen_cmd->add_flag("--all-tied", gen.all_tied, "Each list is a single tie");
  gen_cmd->add_flag("--symmetric", gen.symmetric, "x lists y iff y lists x");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed (default: $SRTI_SEED or 0)");
  gen_cmd->add_option("--budget", gen.budget, "Candidate instances to evaluate");
  gen_cmd->add_option("-o,--out", gen.out, "Output .srti path")->required();

  CombineOptions comb;
  comb.seed = env_seed;
  auto* comb_cmd = app.add_subcommand("combine", "Combine seed instances");
  comb_cmd->add_option("seeds", comb.inputs, "Seed .srti files (with .srti.meta)")->required();
  comb_cmd->add_option("--p1", comb.p1, "Incompleteness probability")->check(CLI::Range(0.0, 1.0));
  comb_cmd->add_option("--p2", comb.p2, "Tie probability")->check(CLI::Range(0.0, 1.0));
  comb_cmd->add_option("--m-cap", comb.m_cap, "Max list length (default: largest seed m)");
  comb_cmd->add_option("--seed", comb.seed, "RNG seed (default: $SRTI_SEED or 0)");
  comb_cmd->add_flag("--smti", comb.smti, "Only link agents of different classes");
  comb_cmd->add_flag("--symmetric", comb.symmetric, "Add pairs in both directions or not at all");
  comb_cmd->add_option("-o,--out", comb.out, "Output .srti path")->required();

  PipelineOptions pipe;
  pipe.spec.rng_seed = env_seed;
  auto* pipe_cmd =
      app.add_subcommand("pipeline", "Generate benchmark instances by the 20-agent block recipe");
  pipe_cmd
      ->add_option("--n-total", pipe.spec.n_total,
                   "Recipe size, a multiple of 20; each 20 adds seeds of 8, 8 and 6 agents")
      ->required();
  pipe_cmd->add_option("--p1", pipe.spec.p1, "Incompleteness probability")
      ->check(CLI::Range(0.0, 1.0));
  pipe_cmd->add_option("--p2", pipe.spec.p2, "Tie probability")->check(CLI::Range(0.0, 1.0));
  pipe_cmd->add_option("--instances", pipe.spec.instances, "Number of instances");
  pipe_cmd->add_option("--seed", pipe.spec.rng_seed, "RNG seed (default: $SRTI_SEED or 0)");
  pipe_cmd->add_option("--budget", pipe.spec.attempt_budget, "Seed search budget");
  pipe_cmd->add_option("--m-cap", pipe.m_cap, "Max list length of combined instances");
  pipe_cmd->add_option("--jobs", pipe.jobs, "Instances generated in parallel");
  pipe_cmd->add_option("--out-dir", pipe.out_dir, "Output directory")->required();

  SearchOptions en, co, eg;
  std::string egal_out;
  auto* en_cmd = app.add_subcommand("enumerate", "List all stable matchings");
  auto* co_cmd = app.add_subcommand("count", "Count stable matchings");
  auto* eg_cmd = app.add_subcommand("solve-egal", "Find an egalitarian stable matching");
  for (auto [cmd, opts] : {std::pair{en_cmd, &en}, {co_cmd, &co}, {eg_cmd, &eg}}) {
    cmd->add_option("instance", opts->input, "Instance .srti file")->required();
    cmd->add_option("--time-limit", opts->time_limit, "Seconds before giving up");
    cmd->add_flag("--json", opts->json, "Report as JSON");
  }
  for (auto [cmd, opts] : {std::pair{en_cmd, &en}, {co_cmd, &co}})
    cmd->add_option("--cap", opts->cap, "Stop after this many matchings")
        ->check(CLI::PositiveNumber);
  en_cmd->add_flag("--print", en.print, "Print every matching");
  eg_cmd->add_option("-o,--out", egal_out, "Write the matching to a .match file");

  VerifyOptions ver;
  auto* ver_cmd = app.add_subcommand("verify", "Re-validate an instance and its provenance");
  ver_cmd->add_option("instance", ver.input, "Instance .srti file")->required();
  ver_cmd->add_option("--matching", ver.matching, "Also check the stability of a .match file");
  ver_cmd->add_option("--bound", ver.bound, "Max witness unions to check");
  ver_cmd->add_flag("--json", ver.json, "Report as JSON");

  BaselineOptions base;
  base.seed = env_seed;
  auto* base_cmd = app.add_subcommand("baseline", "Generate a G(n,p) roommates instance");
  base_cmd->add_option("-n", base.n, "Number of agents")->required();
  base_cmd->add_option("-p", base.p, "Mutual acceptability probability")
      ->check(CLI::Range(0.0, 1.0));
  base_cmd->add_option("--seed", base.seed, "RNG seed (default: $SRTI_SEED or 0)");
  base_cmd->add_option("-o,--out", base.out, "Output .srti path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_seed(gen);
    if (*comb_cmd) return cmd_combine(comb);
    if (*pipe_cmd) return cmd_pipeline(pipe);
    if (*en_cmd) return cmd_enumerate(en, true);
    if (*co_cmd) return cmd_enumerate(co, false);
    if (*eg_cmd) return cmd_solve_egal(eg, egal_out);
    if (*ver_cmd) return cmd_verify(ver);
    if (*base_cmd) return cmd_baseline(base);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const Json::exception& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
