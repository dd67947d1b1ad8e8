#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "archbuild/agent.hpp"
#include "archbuild/checkpoint.hpp"
#include "archbuild/config.hpp"
#include "archbuild/dream.hpp"
#include "archbuild/metrics.hpp"
#include "archbuild/miner.hpp"
#include "archbuild/shapes.hpp"

namespace archbuild {

/// Greedy (epsilon = 0) rollout per catalog shape from the empty grid.
/// Side-effect free: no buffer writes, no training, no rng draws.
inline std::map<std::string, bool> evaluate(const FeedForwardNet& net,
                                            const Lexicon& lexicon,
                                            const ShapeCatalog& catalog,
                                            int budget = kMessageBudget) {
  std::map<std::string, bool> results;
  Rng unused(0);
  for (const Shape& shape : catalog.shapes()) {
    Grid state;
    for (int t = 0; t < budget; ++t) {
      int message_id;
      try {
        message_id = select_message(net, shape.goal, state, lexicon, 0.0, unused);
      } catch (const NoLegalMessage&) {
        break;
      }
      StepResult sr = step(state, shape.goal, message_id, lexicon, t, budget);
      state = sr.next_state;
      if (sr.terminal) break;
    }
    results[shape.name] = state == shape.goal;
  }
  return results;
}

struct RunSummary {
  Mode mode = Mode::full;
  long seed = 0;
  std::optional<long> epochs_to_solve;  // wake epochs; nullopt = DNF
  long wake_epochs = 0;
  long pretrain_epochs = 0;
  int promotions = 0;
  std::filesystem::path run_dir;
};

inline constexpr int kRunStateVersion = 1;

/// One seeded training run: pretraining on random goals, then wake epochs on
/// catalog goals with optional sleep (mining) and dream (replay-rewriting)
/// phases, periodic greedy evaluation, CSV metrics and a final checkpoint.
class Experiment {
 public:
  Experiment(ExperimentConfig cfg, std::filesystem::path run_dir)
      : cfg_(std::move(cfg)), run_dir_(std::move(run_dir)), rng_(0),
        lexicon_(12),
        buffer_(1, 1) {
    cfg_.validate();
    cfg_.out = run_dir_.string();
    catalog_ = cfg_.catalog == "builtin" ? ShapeCatalog::builtin_default()
                                         : ShapeCatalog::load(cfg_.catalog);
    std::filesystem::create_directories(run_dir_);
    {
      std::ofstream echo(run_dir_ / "run_config.txt");
      if (!echo) throw IOError("cannot write run_config.txt in " + run_dir_.string());
      echo << cfg_.render();
    }
    metrics_.open(run_dir_ / "metrics.csv");
    events_.open(run_dir_ / "events.csv");

    rng_ = Rng(static_cast<std::uint64_t>(cfg_.seed));
    lexicon_ = Lexicon(cfg_.m_max);
    net_ = make_architect_network(cfg_.m_max, rng_, cfg_.hidden_dim);
    target_ = sync_target(net_);
    optimizer_ = Optimizer::make(parse_optimizer_kind(cfg_.optimizer),
                                 cfg_.learning_rate, net_);
    std::size_t history =
        static_cast<std::size_t>(std::max<long>(cfg_.window, cfg_.wake_phase_len)) + 16;
    buffer_ = ReplayBuffer(static_cast<std::size_t>(cfg_.replay_capacity), history);
    epsilon_ = cfg_.epsilon_start;
    if (cfg_.mode == Mode::best) preload_abstractions();
  }

  const ExperimentConfig& config() const { return cfg_; }
  const ShapeCatalog& catalog() const { return catalog_; }
  const Lexicon& lexicon() const { return lexicon_; }
  const FeedForwardNet& net() const { return net_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  double epsilon() const { return epsilon_; }
  long wake_epochs_done() const { return wake_done_; }
  long pretrain_epochs_done() const { return pretrain_done_; }
  std::optional<long> solved_epoch() const { return solved_epoch_; }
  int promotions() const { return promotions_; }
  bool finished() const { return finished_; }

  std::map<std::string, bool> evaluate_catalog() const {
    return evaluate(net_, lexicon_, catalog_, cfg_.episode_budget);
  }

  /// Advance one epoch (one training episode plus any due phase work).
  void step_epoch() {
    if (finished_) return;
    if (pretrain_done_ < cfg_.pretrain_epochs) {
      run_pretrain_epoch();
      if (pretrain_done_ == cfg_.pretrain_epochs) {
        wake_watermark_ = buffer_.episode_counter();
        metrics_.flush();
        events_.flush();
      }
      return;
    }
    run_wake_epoch();
    if (cfg_.mode == Mode::full && wake_done_ % cfg_.wake_phase_len == 0) {
      sleep_phase();
    }
    if (wake_done_ % cfg_.eval_interval == 0) run_eval_sweep();
    if (!finished_ && wake_done_ >= cfg_.max_epochs) finished_ = true;  // DNF
  }

  RunSummary run() {
    while (!finished_) step_epoch();
    return finalize();
  }

  RunSummary finalize() {
    metrics_.flush();
    events_.flush();
    metrics_.close();
    events_.close();
    save_checkpoint(net_, optimizer_, lexicon_, run_dir_ / "checkpoint.json");
    RunSummary summary;
    summary.mode = cfg_.mode;
    summary.seed = cfg_.seed;
    summary.epochs_to_solve = solved_epoch_;
    summary.wake_epochs = wake_done_;
    summary.pretrain_epochs = pretrain_done_;
    summary.promotions = promotions_;
    summary.run_dir = run_dir_;
    return summary;
  }

  void save_state(const std::filesystem::path& path) const {
    json j;
    j["version"] = kRunStateVersion;
    j["net"] = net_to_json(net_);
    j["target"] = net_to_json(target_);
    j["optimizer"] = optimizer_to_json(optimizer_);
    j["lexicon"] = lexicon_to_json(lexicon_);
    j["rng"] = rng_.serialize();
    j["epsilon"] = hex_double(epsilon_);
    j["pretrain_done"] = pretrain_done_;
    j["wake_done"] = wake_done_;
    j["global_steps"] = global_steps_;
    j["train_steps"] = train_steps_;
    j["eval_streak"] = eval_streak_;
    j["solved_epoch"] = solved_epoch_ ? *solved_epoch_ : -1;
    j["finished"] = finished_;
    j["promotions"] = promotions_;
    j["wake_watermark"] = wake_watermark_;
    json buf;
    buf["capacity"] = buffer_.capacity();
    buf["write_pos"] = buffer_.write_pos();
    buf["episode_counter"] = buffer_.episode_counter();
    json transitions = json::array();
    for (std::size_t i = 0; i < buffer_.size(); ++i) {
      const Transition& t = buffer_[i];
      transitions.push_back(json::array({t.goal.mask(), t.state.mask(), t.message_id,
                                         hex_double(t.reward), t.next_state.mask(),
                                         t.terminal ? 1 : 0, t.t, t.episode_id}));
    }
    buf["transitions"] = std::move(transitions);
    json episodes = json::array();
    for (const EpisodeMeta& e : buffer_.episodes()) {
      episodes.push_back(json::array({e.id, e.goal.mask(), e.messages, e.success ? 1 : 0}));
    }
    buf["episodes"] = std::move(episodes);
    j["buffer"] = std::move(buf);
    std::ofstream out(path);
    if (!out) throw IOError("cannot write run state: " + path.string());
    out << j.dump() << "\n";
    if (!out) throw IOError("failed writing run state: " + path.string());
  }

  /// Restore a mid-run snapshot; the run continues exactly where it left off
  /// (metrics continue in this experiment's own run directory).
  void load_state(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open run state: " + path.string());
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw CheckpointError("malformed run state: " + std::string(e.what()));
    }
    if (j.at("version").get<int>() != kRunStateVersion) {
      throw FormatVersionMismatch("unsupported run state version");
    }
    net_ = net_from_json(j.at("net"));
    target_ = net_from_json(j.at("target"));
    optimizer_ = optimizer_from_json(j.at("optimizer"), net_);
    lexicon_ = lexicon_from_json(j.at("lexicon"));
    rng_.deserialize(j.at("rng").get<std::string>());
    epsilon_ = parse_hex_double(j.at("epsilon").get<std::string>());
    pretrain_done_ = j.at("pretrain_done").get<long>();
    wake_done_ = j.at("wake_done").get<long>();
    global_steps_ = j.at("global_steps").get<long>();
    train_steps_ = j.at("train_steps").get<long>();
    eval_streak_ = j.at("eval_streak").get<int>();
    long solved = j.at("solved_epoch").get<long>();
    solved_epoch_ = solved >= 0 ? std::optional<long>(solved) : std::nullopt;
    finished_ = j.at("finished").get<bool>();
    promotions_ = j.at("promotions").get<int>();
    wake_watermark_ = j.at("wake_watermark").get<long>();
    const json& buf = j.at("buffer");
    std::vector<Transition> data;
    for (const auto& item : buf.at("transitions")) {
      Transition t;
      t.goal = Grid::from_mask(item.at(0).get<std::uint64_t>());
      t.state = Grid::from_mask(item.at(1).get<std::uint64_t>());
      t.message_id = item.at(2).get<int>();
      t.reward = parse_hex_double(item.at(3).get<std::string>());
      t.next_state = Grid::from_mask(item.at(4).get<std::uint64_t>());
      t.terminal = item.at(5).get<int>() != 0;
      t.t = item.at(6).get<int>();
      t.episode_id = item.at(7).get<long>();
      data.push_back(t);
    }
    std::deque<EpisodeMeta> episodes;
    for (const auto& item : buf.at("episodes")) {
      EpisodeMeta e;
      e.id = item.at(0).get<long>();
      e.goal = Grid::from_mask(item.at(1).get<std::uint64_t>());
      e.messages = item.at(2).get<std::vector<int>>();
      e.success = item.at(3).get<int>() != 0;
      episodes.push_back(std::move(e));
    }
    std::size_t history =
        static_cast<std::size_t>(std::max<long>(cfg_.window, cfg_.wake_phase_len)) + 16;
    buffer_ = ReplayBuffer(buf.at("capacity").get<std::size_t>(), history);
    buffer_.restore(std::move(data), buf.at("write_pos").get<std::size_t>(),
                    std::move(episodes), buf.at("episode_counter").get<long>());
  }

 private:
  void preload_abstractions() {
    std::vector<std::vector<int>> sequences;
    if (cfg_.preload == "families") {
      std::vector<std::string> seen;
      for (const Shape& s : catalog_.shapes()) {
        std::string family = shape_family(s.name);
        if (std::find(seen.begin(), seen.end(), family) != seen.end()) continue;
        seen.push_back(family);
        sequences.push_back(validate_buildable(s.goal).witness);
      }
    } else if (cfg_.preload == "catalog") {
      for (const Shape& s : catalog_.shapes()) {
        sequences.push_back(validate_buildable(s.goal).witness);
      }
    } else {
      for (const std::string& part : split(cfg_.preload, ';')) {
        std::vector<int> seq;
        for (const std::string& name : split(part, '+')) {
          auto id = parse_message_name(std::string(trim(name)));
          if (!id || *id >= kPrimitiveCount) {
            throw ConfigError("bad preload message name '" + name + "'");
          }
          seq.push_back(*id);
        }
        if (seq.empty()) throw ConfigError("empty preload sequence");
        sequences.push_back(std::move(seq));
      }
    }
    for (auto& seq : sequences) {
      if (seq.empty()) {
        throw ConfigError("preload produced an empty build sequence");
      }
      if (lexicon_.find_abstraction(seq)) continue;  // dedup
      if (lexicon_.full()) {
        throw ConfigError("preload needs more abstraction slots; raise m_max");
      }
      int id = lexicon_.add_abstraction(seq);
      events_.write(0, "promotion", lexicon_.describe(id) + ";preload");
    }
  }

  void run_pretrain_epoch() {
    int blocks = static_cast<int>(
        rng_.next_int(cfg_.pretrain_min_blocks, cfg_.pretrain_max_blocks));
    Grid goal = random_goal(rng_, blocks);
    ++pretrain_done_;
    run_training_episode(goal, "random", "pretrain", pretrain_done_);
  }

  void run_wake_epoch() {
    const Shape& shape = catalog_.at(rng_.next_index(catalog_.size()));
    ++wake_done_;
    run_training_episode(shape.goal, shape.name, "wake", wake_done_);
  }

  void run_training_episode(Grid goal, const std::string& goal_name,
                            const char* phase, long epoch) {
    std::vector<double> losses;
    auto hook = [&] {
      ++global_steps_;
      if (buffer_.size() >= static_cast<std::size_t>(cfg_.batch_size) &&
          global_steps_ % cfg_.train_period == 0) {
        losses.push_back(train_step(net_, target_, buffer_, optimizer_,
                                    cfg_.batch_size, cfg_.gamma, lexicon_, rng_,
                                    &scratch_));
        if (++train_steps_ % cfg_.target_sync_interval == 0) {
          target_ = sync_target(net_);
        }
      }
    };
    EpisodeSummary summary = run_episode(net_, goal, lexicon_, epsilon_, rng_,
                                         buffer_, cfg_.episode_budget, hook);
    MetricsRecord record;
    record.epoch = epoch;
    record.phase = phase;
    record.goal = goal_name;
    record.success = summary.success;
    record.steps = summary.steps;
    record.episode_return = summary.episode_return;
    record.epsilon = epsilon_;
    record.lexicon_size = lexicon_.active_count();
    record.mean_loss = losses.empty()
                           ? 0.0
                           : std::accumulate(losses.begin(), losses.end(), 0.0) /
                                 static_cast<double>(losses.size());
    metrics_.write(record);
    epsilon_ = std::max(cfg_.epsilon_floor, epsilon_ * cfg_.epsilon_decay);
  }

  /// Mine the recent successful episodes and promote the top novel candidate.
  /// Duplicates of existing abstractions are skipped; the scan stops at the
  /// first candidate below threshold (ranking is score-descending) or when
  /// the lexicon is full.
  void sleep_phase() {
    auto sequences = collect_sequences(buffer_, cfg_.window);
    auto ranked = mine(sequences, cfg_.min_len, cfg_.max_len);
    for (const CandidateAbstraction& candidate : ranked) {
      PromotionResult result = promote(lexicon_, candidate, cfg_.score_threshold);
      if (result.promoted()) {
        ++promotions_;
        events_.write(wake_done_, "promotion",
                      lexicon_.describe(*result.new_id) +
                          ";score=" + format_double(candidate.score));
        dream_phase(*result.new_id);
        epsilon_ = std::max(epsilon_, cfg_.epsilon_promote_boost);
        break;
      }
      if (result.reason == NoPromotionReason::duplicate) continue;
      break;  // below_threshold or lexicon_full ends the scan
    }
    wake_watermark_ = buffer_.episode_counter();
    metrics_.flush();
    events_.flush();
  }

  /// Rewrite the successful episodes of the wake phase that just ended with
  /// the new abstraction, re-run them through the environment for fresh
  /// rewards, then train on only those transitions before merging them back.
  void dream_phase(int abstraction_id) {
    std::vector<EpisodeMeta> source;
    for (const EpisodeMeta& e : buffer_.episodes()) {
      if (e.id >= wake_watermark_ && e.success) source.push_back(e);
    }
    std::vector<Transition> rewritten;
    std::vector<EpisodeMeta> new_metas;
    for (const EpisodeMeta& e : source) {
      std::vector<int> sequence = rewrite_episode(e.messages, abstraction_id, lexicon_);
      long id = buffer_.begin_episode();
      auto transitions =
          replay_with_rewrite(e.goal, sequence, lexicon_, id, cfg_.episode_budget);
      rewritten.insert(rewritten.end(), transitions.begin(), transitions.end());
      new_metas.push_back(EpisodeMeta{id, e.goal, std::move(sequence), true});
    }
    events_.write(wake_done_, "dream_start",
                  lexicon_.name(abstraction_id) +
                      ";episodes=" + std::to_string(new_metas.size()) +
                      ";transitions=" + std::to_string(rewritten.size()));
    double final_loss = 0.0;
    if (!rewritten.empty() && cfg_.dream_iterations > 0) {
      target_ = sync_target(net_);
      double wake_lr = optimizer_.learning_rate;
      optimizer_.learning_rate = cfg_.dream_learning_rate;
      auto losses = dream_train(net_, target_, rewritten, optimizer_,
                                cfg_.dream_iterations, cfg_.batch_size, cfg_.gamma,
                                lexicon_, rng_, buffer_, &scratch_);
      optimizer_.learning_rate = wake_lr;
      target_ = sync_target(net_);
      if (!losses.empty()) final_loss = losses.back();
    } else {
      // nothing to dream on; still merge (no-op) to keep the contract simple
      for (const Transition& t : rewritten) buffer_.push(t);
    }
    for (EpisodeMeta& meta : new_metas) buffer_.record_episode(std::move(meta));
    events_.write(wake_done_, "dream_end",
                  lexicon_.name(abstraction_id) +
                      ";iterations=" + std::to_string(rewritten.empty() ? 0 : cfg_.dream_iterations) +
                      ";final_loss=" + format_double(final_loss));
  }

  void run_eval_sweep() {
    auto results = evaluate_catalog();
    bool all = std::all_of(results.begin(), results.end(),
                           [](const auto& kv) { return kv.second; });
    if (!all) {
      eval_streak_ = 0;
      return;
    }
    ++eval_streak_;
    events_.write(wake_done_, "eval_pass",
                  "consecutive=" + std::to_string(eval_streak_) + "/" +
                      std::to_string(cfg_.eval_consecutive));
    if (eval_streak_ >= cfg_.eval_consecutive && !solved_epoch_) {
      solved_epoch_ = wake_done_;
      events_.write(wake_done_, "solve",
                    "epochs_to_solve=" + std::to_string(wake_done_));
      finished_ = true;
    }
  }

  ExperimentConfig cfg_;
  std::filesystem::path run_dir_;
  ShapeCatalog catalog_;
  Rng rng_;
  Lexicon lexicon_;
  FeedForwardNet net_;
  FeedForwardNet target_;
  Optimizer optimizer_;
  ReplayBuffer buffer_;
  BatchScratch scratch_;
  MetricsWriter metrics_;
  EventsWriter events_;
  double epsilon_ = 1.0;
  long pretrain_done_ = 0;
  long wake_done_ = 0;
  long global_steps_ = 0;
  long train_steps_ = 0;
  int eval_streak_ = 0;
  std::optional<long> solved_epoch_;
  bool finished_ = false;
  int promotions_ = 0;
  long wake_watermark_ = 0;
};

}  // namespace archbuild
