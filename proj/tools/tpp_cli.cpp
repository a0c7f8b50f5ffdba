// Command-line front end: synthetic bundles, pretraining, runs, baselines, ablations,
// task profiling, the theorem suites and a timing table.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tpp/harness.hpp"
#include "tpp/io.hpp"
#include "tpp/verify.hpp"

namespace {

using namespace tpp;

struct CommonOptions {
  std::string config;
  std::string bundle;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o, const std::string& out_help) {
  cmd->add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--bundle", o.bundle, "dataset directory (edges.tsv, features.bin, labels.txt, tasks.json)");
  cmd->add_option("--seed", o.seed, "run seed");
  cmd->add_option("--set", o.sets, "override a config key, e.g. --set task_epochs=50");
  if (!out_help.empty()) cmd->add_option("--out", o.out, out_help);
}

// Defaults, then the config file, then command-line flags.
RunConfig effective_config(const CommonOptions& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : RunConfig::load(o.config);
  if (!o.bundle.empty()) cfg.bundle = o.bundle;
  if (o.seed) cfg.seed = *o.seed;
  for (const std::string& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

void print_result(const RunResult& r) {
  std::printf("%s: AA %.4f  AF %s\n", r.method.c_str(), r.aa, r.af ? std::to_string(*r.af).c_str() : "n/a");
  if (!r.task_id_accuracy.empty()) std::printf("task-ID accuracy %.3f\n", r.overall_task_id_accuracy());
}

void finish_run(const RunResult& r, const std::string& out) {
  print_result(r);
  if (!out.empty()) {
    write_run_outputs(out, r);
    std::printf("wrote %s\n", out.c_str());
  }
}

AblationFlags parse_flags(const std::vector<std::string>& names) {
  AblationFlags flags;
  for (const std::string& n : names) {
    if (n == "prompt_off") flags.prompt_on = false;
    else if (n == "head_off") flags.head_on = false;
    else if (n == "task_id_off") flags.task_id_on = false;
    else if (n != "none") throw InvalidArgument("unknown ablation flag '" + n + "' (prompt_off, head_off, task_id_off, none)");
  }
  return flags;
}

int cmd_synth(const CommonOptions& o) {
  const RunConfig cfg = effective_config(o);
  const SbmStream s = generate_sbm_stream(cfg.stream_spec());
  write_bundle(DatasetBundle::in_directory(o.out), s.graph, s.groups);
  std::printf("wrote %zu nodes, %zu edges, %zu tasks to %s\n", s.graph.num_nodes(), s.graph.num_edges(),
              s.groups.size(), o.out.c_str());
  return 0;
}

int cmd_pretrain(const CommonOptions& o) {
  RunConfig cfg = effective_config(o);
  cfg.backbone.clear();
  const SgcBackbone bb = obtain_backbone(make_stream(cfg), cfg);
  bb.save(o.out);
  std::printf("backbone %zu -> %zu, fingerprint %016llx, wrote %s\n", bb.input_dim(), bb.hidden_dim(),
              static_cast<unsigned long long>(bb.fingerprint()), o.out.c_str());
  return 0;
}

int cmd_profile(const CommonOptions& o) {
  const RunConfig cfg = effective_config(o);
  const TaskStream stream = make_stream(cfg);
  const ProfileReport r = profile_tasks(stream, cfg);
  std::printf("task  laplacian  attribute\n");
  for (std::size_t t = 0; t < stream.size(); ++t) {
    std::printf("%4zu  %9d  %9d\n", t + 1, r.laplacian_predictions[t], r.attribute_predictions[t]);
  }
  std::printf("laplacian task-ID accuracy %.3f\n", r.laplacian_accuracy);
  std::printf("attribute task-ID accuracy %.3f\n", r.attribute_accuracy);
  return 0;
}

int cmd_verify(std::size_t graphs, std::uint64_t seed) {
  SuiteOptions opts;
  opts.graphs = graphs;
  opts.seed = seed;
  bool ok = true;
  for (const CheckResult& c : run_theorem_suites(opts)) {
    std::printf("[%s] %s: %s\n", c.passed ? "pass" : "FAIL", c.name.c_str(), c.detail.c_str());
    ok = ok && c.passed;
  }
  return ok ? 0 : 1;
}

int cmd_bench(const CommonOptions& o, const std::vector<std::size_t>& sizes) {
  const RunConfig base = effective_config(o);
  std::printf("%8s %8s %10s %10s %10s %10s\n", "nodes", "edges", "pretrain", "profile", "train", "evaluate");
  for (std::size_t per_class : sizes) {
    RunConfig cfg = base;
    cfg.sbm.nodes_per_class = per_class;
    // Keep the expected degree fixed so the edge count grows linearly with the node count.
    const double scale = static_cast<double>(base.sbm.nodes_per_class) / static_cast<double>(per_class);
    cfg.sbm.intra_prob = std::min(1.0, base.sbm.intra_prob * scale);
    cfg.sbm.inter_prob = std::min(1.0, base.sbm.inter_prob * scale);
    const TaskStream stream = make_stream(cfg);
    std::size_t edges = 0;
    std::size_t nodes = 0;
    for (const Task& t : stream.tasks) {
      edges += t.graph.num_edges();
      nodes += t.graph.num_nodes();
    }
    const RunResult r = run_tpp(stream, cfg);
    auto phase = [&](const char* name) {
      for (const PhaseTiming& p : r.timings) {
        if (p.phase == name) return p.seconds;
      }
      return 0.0;
    };
    std::printf("%8zu %8zu %10.4f %10.4f %10.4f %10.4f\n", nodes, edges, phase("pretrain"), phase("profile"),
                phase("train"), phase("evaluate"));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task profiling and graph prompting for class-incremental node classification"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  CommonOptions synth_o, pretrain_o, run_o, base_o, ablate_o, profile_o, bench_o;
  std::string kind;
  std::vector<std::string> flags;
  std::size_t verify_graphs = 20;
  std::uint64_t verify_seed = 0;
  std::vector<std::size_t> bench_sizes{25, 50, 100, 200};

  auto* synth = app.add_subcommand("synth", "write a synthetic SBM bundle");
  add_common(synth, synth_o, "bundle directory");
  synth->get_option("--out")->required();

  auto* pretrain = app.add_subcommand("pretrain", "contrastively pretrain the backbone on task 1");
  add_common(pretrain, pretrain_o, "backbone file");
  pretrain_o.out = "backbone.bin";

  auto* run = app.add_subcommand("run", "full pipeline, writes result.json, accuracy.csv, timings.json");
  add_common(run, run_o, "output directory");

  auto* baseline = app.add_subcommand("baseline", "run a reference method");
  add_common(baseline, base_o, "output directory");
  baseline->add_option("--kind", kind, "fine_tune, joint, per_task_models or attribute_profiling_tpp")->required();

  auto* ablate = app.add_subcommand("ablate", "run with components switched off");
  add_common(ablate, ablate_o, "output directory");
  ablate->add_option("--flags", flags, "prompt_off, head_off, task_id_off (comma separated)")
      ->delimiter(',')
      ->required();

  auto* profile = app.add_subcommand("profile-tasks", "task-ID accuracy of Laplacian vs attribute prototypes");
  add_common(profile, profile_o, "");

  auto* verify = app.add_subcommand("verify", "prototype convergence and limit checks on random graphs");
  verify->add_option("--graphs", verify_graphs, "graphs in the family");
  verify->add_option("--seed", verify_seed, "family seed");

  auto* bench = app.add_subcommand("bench", "per-phase wall clock across stream sizes");
  add_common(bench, bench_o, "");
  bench->add_option("--sizes", bench_sizes, "nodes per class, comma separated")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return cmd_synth(synth_o);
    if (*pretrain) return cmd_pretrain(pretrain_o);
    if (*run) {
      const RunConfig cfg = effective_config(run_o);
      finish_run(run_tpp(make_stream(cfg), cfg), run_o.out);
      return 0;
    }
    if (*baseline) {
      const BaselineKind k = parse_baseline_kind(kind);
      const RunConfig cfg = effective_config(base_o);
      finish_run(run_baseline(make_stream(cfg), k, cfg), base_o.out);
      return 0;
    }
    if (*ablate) {
      const AblationFlags f = parse_flags(flags);
      const RunConfig cfg = effective_config(ablate_o);
      finish_run(run_ablation(make_stream(cfg), f, cfg), ablate_o.out);
      return 0;
    }
    if (*profile) return cmd_profile(profile_o);
    if (*verify) return cmd_verify(verify_graphs, verify_seed);
    if (*bench) return cmd_bench(bench_o, bench_sizes);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
