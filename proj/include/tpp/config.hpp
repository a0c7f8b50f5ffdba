#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace tpp {

enum class Ordering { listed, ascending, descending, random };
enum class Profiling { laplacian, attribute };

std::string_view to_string(Ordering o);
std::string_view to_string(Profiling p);
Ordering parse_ordering(std::string_view s);
Profiling parse_profiling(std::string_view s);

// Synthetic stochastic-block-model stream parameters.
struct SbmSpec {
  std::size_t tasks = 5;
  std::size_t classes_per_task = 2;
  std::size_t nodes_per_class = 50;
  double intra_prob = 0.3;       // same class
  double inter_prob = 0.05;      // different class, same task
  double cross_task_prob = 0.0;  // different task
  std::size_t feature_dim = 16;
  double mean_shift = 2.0;
  double noise = 0.5;
  // Every task shares the same class means; tasks differ only in edge density, which decays
  // geometrically by `density_decay` from the last task to the first.
  bool adversarial = false;
  double density_decay = 0.5;
  std::uint64_t seed = 0;

  void validate() const;

  friend bool operator==(const SbmSpec&, const SbmSpec&) = default;
};

// Every tunable of a run. Defaults follow the desk-scale setup.
struct RunConfig {
  std::uint64_t seed = 0;

  int smoothing_steps = 3;
  std::size_t prompt_tokens = 3;
  std::size_t hidden_dim = 64;
  int steps_per_layer = 1;

  double task_lr = 0.005;
  int task_epochs = 200;
  double contrastive_lr = 0.001;
  int contrastive_epochs = 200;
  double temperature = 0.5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double edge_removal = 0.2;
  double attr_mask = 0.3;
  bool fresh_views_per_epoch = true;
  double prompt_init_sigma = 0.01;

  Ordering ordering = Ordering::ascending;
  std::size_t classes_per_task = 2;

  bool prompt_on = true;
  bool head_on = true;
  bool task_id_on = true;
  Profiling profiling = Profiling::laplacian;
  bool balanced_accuracy = false;
  bool oracle_task_ids = false;

  std::string bundle;    // dataset directory; empty selects the synthetic stream
  std::string backbone;  // pretrained backbone file; empty pretrains on task 1

  SbmSpec sbm;  // classes_per_task and seed are taken from the fields above

  void validate() const;
  SbmSpec stream_spec() const;

  // Canonical "key = value" text, one line per field in declaration order.
  std::string serialize() const;
  // Applies `text` on top of `*this`. Unknown keys, malformed values and repeated keys throw.
  void apply(std::string_view text);
  // Applies a single assignment, e.g. from the command line.
  void set(std::string_view key, std::string_view value);

  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Full-scale preset: hidden width 256.
RunConfig full_scale_config();

}  // namespace tpp
