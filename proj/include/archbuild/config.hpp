#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "archbuild/errors.hpp"
#include "archbuild/message.hpp"
#include "archbuild/nn.hpp"
#include "archbuild/textio.hpp"

namespace archbuild {

enum class Mode { worst, best, full };

inline std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::worst: return "worst";
    case Mode::best: return "best";
    case Mode::full: return "full";
  }
  return "?";
}

inline Mode parse_mode(const std::string& name) {
  if (name == "worst") return Mode::worst;
  if (name == "best") return Mode::best;
  if (name == "full") return Mode::full;
  throw ConfigError("unknown mode '" + name + "' (want worst, best or full)");
}

struct ExperimentConfig {
  Mode mode = Mode::full;
  long seed = 1;
  int m_max = kDefaultMMax;
  int hidden_dim = kDefaultHiddenDim;
  long pretrain_epochs = 20000;
  long max_epochs = 500000;
  long wake_phase_len = 2000;
  double score_threshold = 4.0;
  int min_len = 2;
  int max_len = 6;
  int window = 10;
  double epsilon_start = 1.0;
  double epsilon_decay = 0.99995;
  double epsilon_floor = 0.05;
  double epsilon_promote_boost = 0.3;
  std::string optimizer = "adam";
  double learning_rate = 1e-4;
  double gamma = 1.0;
  long replay_capacity = 100000;
  int batch_size = 64;
  long target_sync_interval = 500;
  int train_period = 1;
  long dream_iterations = 2000;
  double dream_learning_rate = 1e-3;
  long eval_interval = 500;
  int eval_consecutive = 3;
  std::string catalog = "builtin";  // or a shape-file path
  std::string preload = "families"; // best mode: families | catalog | explicit list
  int episode_budget = 10;
  int pretrain_min_blocks = 1;
  int pretrain_max_blocks = 3;
  std::string out;  // run directory; the CLI --out flag overrides

  void validate() const {
    auto positive = [](long v, const char* key) {
      if (v <= 0) throw ConfigError(std::string(key) + " must be positive");
    };
    if (m_max < kPrimitiveCount) {
      throw ConfigError("m_max must be at least " + std::to_string(kPrimitiveCount));
    }
    positive(hidden_dim, "hidden_dim");
    if (pretrain_epochs < 0) throw ConfigError("pretrain_epochs must be >= 0");
    positive(max_epochs, "max_epochs");
    positive(wake_phase_len, "wake_phase_len");
    if (min_len < 2) throw ConfigError("min_len must be >= 2");
    if (max_len < min_len) throw ConfigError("max_len must be >= min_len");
    positive(window, "window");
    if (epsilon_start < 0 || epsilon_start > 1) throw ConfigError("epsilon_start must be in [0,1]");
    if (epsilon_decay <= 0 || epsilon_decay > 1) throw ConfigError("epsilon_decay must be in (0,1]");
    if (epsilon_floor < 0 || epsilon_floor > 1) throw ConfigError("epsilon_floor must be in [0,1]");
    parse_optimizer_kind(optimizer);
    if (learning_rate <= 0) throw ConfigError("learning_rate must be positive");
    if (dream_learning_rate <= 0) throw ConfigError("dream_learning_rate must be positive");
    if (gamma < 0 || gamma > 1) throw ConfigError("gamma must be in [0,1]");
    positive(replay_capacity, "replay_capacity");
    positive(batch_size, "batch_size");
    positive(target_sync_interval, "target_sync_interval");
    positive(train_period, "train_period");
    if (dream_iterations < 0) throw ConfigError("dream_iterations must be >= 0");
    positive(eval_interval, "eval_interval");
    positive(eval_consecutive, "eval_consecutive");
    positive(episode_budget, "episode_budget");
    positive(pretrain_min_blocks, "pretrain_min_blocks");
    if (pretrain_max_blocks < pretrain_min_blocks) {
      throw ConfigError("pretrain_max_blocks must be >= pretrain_min_blocks");
    }
  }

  void set(const std::string& key, const std::string& value) {
    try {
      if (key == "mode") mode = parse_mode(value);
      else if (key == "seed") seed = parse_long(value);
      else if (key == "m_max") m_max = static_cast<int>(parse_long(value));
      else if (key == "hidden_dim") hidden_dim = static_cast<int>(parse_long(value));
      else if (key == "pretrain_epochs") pretrain_epochs = parse_long(value);
      else if (key == "max_epochs") max_epochs = parse_long(value);
      else if (key == "wake_phase_len") wake_phase_len = parse_long(value);
      else if (key == "score_threshold") score_threshold = parse_double(value);
      else if (key == "min_len") min_len = static_cast<int>(parse_long(value));
      else if (key == "max_len") max_len = static_cast<int>(parse_long(value));
      else if (key == "window") window = static_cast<int>(parse_long(value));
      else if (key == "epsilon_start") epsilon_start = parse_double(value);
      else if (key == "epsilon_decay") epsilon_decay = parse_double(value);
      else if (key == "epsilon_floor") epsilon_floor = parse_double(value);
      else if (key == "epsilon_promote_boost") epsilon_promote_boost = parse_double(value);
      else if (key == "optimizer") optimizer = value;
      else if (key == "learning_rate") learning_rate = parse_double(value);
      else if (key == "gamma") gamma = parse_double(value);
      else if (key == "replay_capacity") replay_capacity = parse_long(value);
      else if (key == "batch_size") batch_size = static_cast<int>(parse_long(value));
      else if (key == "target_sync_interval") target_sync_interval = parse_long(value);
      else if (key == "train_period") train_period = static_cast<int>(parse_long(value));
      else if (key == "dream_iterations") dream_iterations = parse_long(value);
      else if (key == "dream_learning_rate") dream_learning_rate = parse_double(value);
      else if (key == "eval_interval") eval_interval = parse_long(value);
      else if (key == "eval_consecutive") eval_consecutive = static_cast<int>(parse_long(value));
      else if (key == "catalog") catalog = value;
      else if (key == "preload") preload = value;
      else if (key == "episode_budget") episode_budget = static_cast<int>(parse_long(value));
      else if (key == "pretrain_min_blocks") pretrain_min_blocks = static_cast<int>(parse_long(value));
      else if (key == "pretrain_max_blocks") pretrain_max_blocks = static_cast<int>(parse_long(value));
      else if (key == "out") out = value;
      else throw ConfigError("unknown config key '" + key + "'");
    } catch (const ParseError& e) {
      throw ConfigError("bad value for '" + key + "': " + e.what());
    }
  }

  std::string render() const {
    std::ostringstream o;
    o << "mode = " << mode_name(mode) << "\n";
    o << "seed = " << seed << "\n";
    o << "m_max = " << m_max << "\n";
    o << "hidden_dim = " << hidden_dim << "\n";
    o << "pretrain_epochs = " << pretrain_epochs << "\n";
    o << "max_epochs = " << max_epochs << "\n";
    o << "wake_phase_len = " << wake_phase_len << "\n";
    o << "score_threshold = " << format_double(score_threshold) << "\n";
    o << "min_len = " << min_len << "\n";
    o << "max_len = " << max_len << "\n";
    o << "window = " << window << "\n";
    o << "epsilon_start = " << format_double(epsilon_start) << "\n";
    o << "epsilon_decay = " << format_double(epsilon_decay) << "\n";
    o << "epsilon_floor = " << format_double(epsilon_floor) << "\n";
    o << "epsilon_promote_boost = " << format_double(epsilon_promote_boost) << "\n";
    o << "optimizer = " << optimizer << "\n";
    o << "learning_rate = " << format_double(learning_rate) << "\n";
    o << "gamma = " << format_double(gamma) << "\n";
    o << "replay_capacity = " << replay_capacity << "\n";
    o << "batch_size = " << batch_size << "\n";
    o << "target_sync_interval = " << target_sync_interval << "\n";
    o << "train_period = " << train_period << "\n";
    o << "dream_iterations = " << dream_iterations << "\n";
    o << "dream_learning_rate = " << format_double(dream_learning_rate) << "\n";
    o << "eval_interval = " << eval_interval << "\n";
    o << "eval_consecutive = " << eval_consecutive << "\n";
    o << "catalog = " << catalog << "\n";
    o << "preload = " << preload << "\n";
    o << "episode_budget = " << episode_budget << "\n";
    o << "pretrain_min_blocks = " << pretrain_min_blocks << "\n";
    o << "pretrain_max_blocks = " << pretrain_max_blocks << "\n";
    o << "out = " << out << "\n";
    return o.str();
  }
};

/// Flat `key = value` lines; '#' starts a comment; unknown keys are errors.
inline ExperimentConfig parse_config_text(const std::string& text,
                                          const std::string& origin = "<config>") {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    std::string key(trim(view.substr(0, eq)));
    std::string value(trim(view.substr(eq + 1)));
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

}  // namespace archbuild
