#include "tpp/config.hpp"

#include <charconv>
#include <set>
#include <sstream>
#include <vector>

#include "tpp/binary_io.hpp"
#include "tpp/error.hpp"

namespace tpp {

std::string_view to_string(Ordering o) {
  switch (o) {
    case Ordering::listed: return "listed";
    case Ordering::ascending: return "ascending";
    case Ordering::descending: return "descending";
    case Ordering::random: return "random";
  }
  return "?";
}

std::string_view to_string(Profiling p) { return p == Profiling::laplacian ? "laplacian" : "attribute"; }

Ordering parse_ordering(std::string_view s) {
  for (Ordering o : {Ordering::listed, Ordering::ascending, Ordering::descending, Ordering::random}) {
    if (to_string(o) == s) return o;
  }
  throw InvalidArgument("unknown ordering '" + std::string(s) + "'");
}

Profiling parse_profiling(std::string_view s) {
  if (s == "laplacian") return Profiling::laplacian;
  if (s == "attribute") return Profiling::attribute;
  throw InvalidArgument("unknown profiling mode '" + std::string(s) + "'");
}

namespace {

void check_prob(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string(name) + " must lie in [0, 1]");
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw InvalidArgument("config: bad value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw InvalidArgument("config: expected true/false for " + std::string(key) + ", got '" + std::string(value) + "'");
}

// Field table shared by serialize() and set(): each entry renders and assigns one key.
struct Field {
  const char* key;
  std::string (*get)(const RunConfig&);
  void (*put)(RunConfig&, std::string_view key, std::string_view value);
};

#define TPP_NUM_FIELD(name, member, type)                                                                 \
  Field {                                                                                                 \
    name, [](const RunConfig& c) { return std::to_string(c.member); },                                    \
        [](RunConfig& c, std::string_view k, std::string_view v) { c.member = parse_number<type>(k, v); } \
  }
#define TPP_REAL_FIELD(name, member)                                                                        \
  Field {                                                                                                   \
    name, [](const RunConfig& c) { return format_double(c.member); },                                       \
        [](RunConfig& c, std::string_view k, std::string_view v) { c.member = parse_number<double>(k, v); } \
  }
#define TPP_BOOL_FIELD(name, member)                                                                \
  Field {                                                                                           \
    name, [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); },              \
        [](RunConfig& c, std::string_view k, std::string_view v) { c.member = parse_bool(k, v); }  \
  }
#define TPP_STR_FIELD(name, member)                                                                     \
  Field {                                                                                               \
    name, [](const RunConfig& c) { return c.member; },                                                  \
        [](RunConfig& c, std::string_view, std::string_view v) { c.member = std::string(v); }           \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      TPP_NUM_FIELD("seed", seed, std::uint64_t),
      TPP_NUM_FIELD("smoothing_steps", smoothing_steps, int),
      TPP_NUM_FIELD("prompt_tokens", prompt_tokens, std::size_t),
      TPP_NUM_FIELD("hidden_dim", hidden_dim, std::size_t),
      TPP_NUM_FIELD("steps_per_layer", steps_per_layer, int),
      TPP_REAL_FIELD("task_lr", task_lr),
      TPP_NUM_FIELD("task_epochs", task_epochs, int),
      TPP_REAL_FIELD("contrastive_lr", contrastive_lr),
      TPP_NUM_FIELD("contrastive_epochs", contrastive_epochs, int),
      TPP_REAL_FIELD("temperature", temperature),
      TPP_REAL_FIELD("adam_beta1", adam_beta1),
      TPP_REAL_FIELD("adam_beta2", adam_beta2),
      TPP_REAL_FIELD("adam_eps", adam_eps),
      TPP_REAL_FIELD("edge_removal", edge_removal),
      TPP_REAL_FIELD("attr_mask", attr_mask),
      TPP_BOOL_FIELD("fresh_views_per_epoch", fresh_views_per_epoch),
      TPP_REAL_FIELD("prompt_init_sigma", prompt_init_sigma),
      Field{"ordering", [](const RunConfig& c) { return std::string(to_string(c.ordering)); },
            [](RunConfig& c, std::string_view, std::string_view v) { c.ordering = parse_ordering(v); }},
      TPP_NUM_FIELD("classes_per_task", classes_per_task, std::size_t),
      TPP_BOOL_FIELD("prompt_on", prompt_on),
      TPP_BOOL_FIELD("head_on", head_on),
      TPP_BOOL_FIELD("task_id_on", task_id_on),
      Field{"profiling", [](const RunConfig& c) { return std::string(to_string(c.profiling)); },
            [](RunConfig& c, std::string_view, std::string_view v) { c.profiling = parse_profiling(v); }},
      TPP_BOOL_FIELD("balanced_accuracy", balanced_accuracy),
      TPP_BOOL_FIELD("oracle_task_ids", oracle_task_ids),
      TPP_STR_FIELD("bundle", bundle),
      TPP_STR_FIELD("backbone", backbone),
      TPP_NUM_FIELD("sbm.tasks", sbm.tasks, std::size_t),
      TPP_NUM_FIELD("sbm.nodes_per_class", sbm.nodes_per_class, std::size_t),
      TPP_REAL_FIELD("sbm.intra_prob", sbm.intra_prob),
      TPP_REAL_FIELD("sbm.inter_prob", sbm.inter_prob),
      TPP_REAL_FIELD("sbm.cross_task_prob", sbm.cross_task_prob),
      TPP_NUM_FIELD("sbm.feature_dim", sbm.feature_dim, std::size_t),
      TPP_REAL_FIELD("sbm.mean_shift", sbm.mean_shift),
      TPP_REAL_FIELD("sbm.noise", sbm.noise),
      TPP_BOOL_FIELD("sbm.adversarial", sbm.adversarial),
      TPP_REAL_FIELD("sbm.density_decay", sbm.density_decay),
  };
  return table;
}

#undef TPP_NUM_FIELD
#undef TPP_REAL_FIELD
#undef TPP_BOOL_FIELD
#undef TPP_STR_FIELD

const Field& find_field(std::string_view key) {
  for (const Field& f : fields()) {
    if (key == f.key) return f;
  }
  throw InvalidArgument("config: unknown key '" + std::string(key) + "'");
}

}  // namespace

void SbmSpec::validate() const {
  check_prob(intra_prob, "sbm.intra_prob");
  check_prob(inter_prob, "sbm.inter_prob");
  check_prob(cross_task_prob, "sbm.cross_task_prob");
  if (!(mean_shift >= 0.0)) throw InvalidArgument("sbm.mean_shift must be >= 0");
  if (!(noise >= 0.0)) throw InvalidArgument("sbm.noise must be >= 0");
  if (!(density_decay > 0.0 && density_decay <= 1.0)) throw InvalidArgument("sbm.density_decay must lie in (0, 1]");
  if (tasks == 0 || classes_per_task == 0 || nodes_per_class == 0 || feature_dim == 0) {
    throw InvalidArgument("sbm: tasks, classes, nodes per class and feature_dim must be positive");
  }
}

void RunConfig::validate() const {
  if (smoothing_steps < 0) throw InvalidArgument("smoothing_steps must be >= 0");
  if (prompt_tokens == 0) throw InvalidArgument("prompt_tokens must be >= 1");
  if (hidden_dim == 0) throw InvalidArgument("hidden_dim must be >= 1");
  if (steps_per_layer < 1) throw InvalidArgument("steps_per_layer must be >= 1");
  if (!(task_lr > 0.0) || !(contrastive_lr > 0.0)) throw InvalidArgument("learning rates must be > 0");
  if (task_epochs < 0 || contrastive_epochs < 0) throw InvalidArgument("epochs must be >= 0");
  if (!(temperature > 0.0)) throw InvalidArgument("temperature must be > 0");
  check_prob(edge_removal, "edge_removal");
  check_prob(attr_mask, "attr_mask");
  if (classes_per_task == 0) throw InvalidArgument("classes_per_task must be >= 1");
  sbm.validate();
}

std::string RunConfig::serialize() const {
  std::string out;
  for (const Field& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(*this);
    out += '\n';
  }
  return out;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  find_field(key).put(*this, key, value);
}

void RunConfig::apply(std::string_view text) {
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.emplace(key).second) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": key '" + std::string(key) + "' set twice");
    }
    set(key, value);
  }
}

SbmSpec RunConfig::stream_spec() const {
  SbmSpec s = sbm;
  s.classes_per_task = classes_per_task;
  s.seed = seed;
  return s;
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig c;
  c.apply(text);
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) { return parse(binary::read_file(path)); }

RunConfig full_scale_config() {
  RunConfig c;
  c.hidden_dim = 256;
  return c;
}

}  // namespace tpp
