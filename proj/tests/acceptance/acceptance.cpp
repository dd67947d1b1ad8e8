// Acceptance suite: one pass/fail line per criterion.
//
//   1. mode ordering on the desk-scale 3-shape catalog (3 seeds per mode)
//   2. reward arithmetic exactness
//   3. analytic vs finite-difference gradients (100 toy nets, <= 10 s)
//   4. miner vs brute-force oracle (500 instances, <= 10 s)
//   5. rewrite properties on 200 random episodes
//   6. abstraction usage after one promotion + dream (<= 30 s)
//   7. run determinism and mid-run snapshot resume
//   8. builtin catalog integrity
//
// Usage: acceptance [--only 1,4,...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "archbuild/experiment.hpp"
#include "archbuild/report.hpp"

using namespace archbuild;
namespace fs = std::filesystem;

namespace {

struct CriterionResult {
  int number = 0;
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

fs::path work_dir() {
  auto dir = fs::temp_directory_path() / "archbuild_acceptance";
  fs::create_directories(dir);
  return dir;
}

fs::path fresh_dir(const std::string& name) {
  auto dir = work_dir() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------- criterion 1

fs::path desk_catalog_file() {
  auto catalog = ShapeCatalog::builtin_default().subset({"U1", "C3", "L5"});
  auto path = work_dir() / "desk.shapes";
  catalog.save(path);
  return path;
}

ExperimentConfig desk_config(Mode mode, long seed, const std::string& catalog_path) {
  ExperimentConfig cfg;
  cfg.mode = mode;
  cfg.seed = seed;
  cfg.catalog = catalog_path;
  cfg.m_max = 20;
  cfg.hidden_dim = 64;
  cfg.pretrain_epochs = 2000;
  cfg.max_epochs = 80000;
  cfg.wake_phase_len = 1000;
  cfg.score_threshold = 4.0;
  cfg.window = 10;
  cfg.optimizer = "adam";
  cfg.learning_rate = 5e-4;
  cfg.batch_size = 32;
  cfg.replay_capacity = 30000;
  cfg.target_sync_interval = 300;
  cfg.train_period = 1;
  cfg.dream_iterations = 2000;
  cfg.dream_learning_rate = 1e-3;
  cfg.epsilon_start = 1.0;
  cfg.epsilon_decay = 0.9995;
  cfg.epsilon_floor = 0.05;
  cfg.eval_interval = 500;
  cfg.eval_consecutive = 3;
  cfg.preload = "families";
  return cfg;
}

long median3(std::vector<long> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

CriterionResult criterion_mode_ordering() {
  CriterionResult result{1, false, ""};
  auto start = std::chrono::steady_clock::now();
  auto catalog_path = desk_catalog_file().string();
  const std::vector<long> seeds{1, 2, 3};
  std::map<Mode, std::vector<long>> epochs;
  std::ostringstream detail;
  bool all_solved = true;
  for (Mode mode : {Mode::best, Mode::full, Mode::worst}) {
    for (long seed : seeds) {
      auto dir = fresh_dir("ordering_" + mode_name(mode) + "_s" + std::to_string(seed));
      Experiment experiment(desk_config(mode, seed, catalog_path), dir);
      auto summary = experiment.run();
      if (summary.epochs_to_solve) {
        epochs[mode].push_back(*summary.epochs_to_solve);
      } else {
        all_solved = false;
        epochs[mode].push_back(summary.wake_epochs + 1);  // DNF sentinel
      }
      detail << mode_name(mode) << "/s" << seed << "="
             << (summary.epochs_to_solve ? std::to_string(*summary.epochs_to_solve)
                                         : std::string("DNF"))
             << " ";
    }
  }
  long best = median3(epochs[Mode::best]);
  long full = median3(epochs[Mode::full]);
  long worst = median3(epochs[Mode::worst]);
  double elapsed = seconds_since(start);
  bool ordered = best < full && full < worst;
  result.pass = all_solved && ordered && elapsed <= 3600.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "medians best=%ld full=%ld worst=%ld (%.0fs)",
                best, full, worst, elapsed);
  result.detail = std::string(buf) + " | " + detail.str();
  return result;
}

// ---------------------------------------------------------------- criterion 2

CriterionResult criterion_reward_exactness() {
  CriterionResult result{2, false, ""};
  Grid goal;
  goal.set(0, 1);
  goal.set(1, 1);
  Grid other;
  other.set(0, 3);
  other.set(1, 3);
  bool ok = true;
  ok = ok && reward(other, goal, 2, 0) == 0.2;
  double r = reward(goal, goal, 2, 3);
  ok = ok && r == (0.1 * 2 + 1.0) * (0.9 * 0.9 * 0.9);
  ok = ok && std::abs(r - 0.8748) < 1e-15;
  ok = ok && reward(goal, goal, 6, 0) == 1.6;
  ok = ok && reward(other, goal, 0, 7) == 0.0;

  // the same numbers must come out of a real step()
  Lexicon lexicon(20);
  int a = lexicon.add_abstraction({0, 1, 6});
  Grid u;
  for (int id : {0, 1, 6}) u = place_block(u, primitive_action(id)).new_grid;
  StepResult sr = step(Grid{}, u, a, lexicon, 0);
  ok = ok && sr.reward == 1.6 && sr.cells_matched == 6 && sr.terminal;
  result.pass = ok;
  result.detail = "0.2 / 0.8748 / 1.6 reproduced exactly";
  return result;
}

// ---------------------------------------------------------------- criterion 3

std::pair<std::vector<double>, double> plain_forward(const FeedForwardNet& net,
                                                     const std::vector<double>& x) {
  std::vector<double> cur = x;
  double min_abs_preact = 1e300;
  for (int l = 0; l < net.layer_count(); ++l) {
    const Matrix& w = net.weights[static_cast<std::size_t>(l)];
    std::vector<double> z(static_cast<std::size_t>(w.rows), 0.0);
    for (int i = 0; i < w.rows; ++i) {
      double acc = net.biases[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)];
      for (int j = 0; j < w.cols; ++j) acc += w(i, j) * cur[static_cast<std::size_t>(j)];
      z[static_cast<std::size_t>(i)] = acc;
    }
    if (l + 1 < net.layer_count()) {
      for (double& v : z) {
        min_abs_preact = std::min(min_abs_preact, std::abs(v));
        if (v < 0.0) v = 0.0;
      }
    }
    cur = std::move(z);
  }
  return {cur, min_abs_preact};
}

CriterionResult criterion_gradients() {
  CriterionResult result{3, false, ""};
  auto start = std::chrono::steady_clock::now();
  Rng rng(424242);
  double worst_rel = 0.0;
  long checked = 0, skipped = 0;
  const double fd_eps = 1e-4;
  const double kink_margin = 5e-3;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> dims{4 + static_cast<int>(rng.next_index(4)),
                          3 + static_cast<int>(rng.next_index(6)),
                          3 + static_cast<int>(rng.next_index(6)),
                          2 + static_cast<int>(rng.next_index(4))};
    auto net = make_network(dims, rng);
    std::vector<double> x(static_cast<std::size_t>(dims.front()));
    std::vector<double> og(static_cast<std::size_t>(dims.back()));
    for (double& v : x) v = 2.0 * rng.next_double() - 1.0;
    for (double& v : og) v = 2.0 * rng.next_double() - 1.0;

    ForwardTrace trace;
    forward_trace(net, x, trace);
    Gradients analytic = Gradients::like(net);
    backward(net, trace, og, analytic);

    auto weighted = [&](void) {
      auto out = net.forward(x);
      double acc = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) acc += out[i] * og[i];
      return acc;
    };
    auto probe = [&](double& param, double agrad) {
      double saved = param;
      param = saved + fd_eps;
      auto [out_p, kink_p] = plain_forward(net, x);
      double f_plus = weighted();
      param = saved - fd_eps;
      auto [out_m, kink_m] = plain_forward(net, x);
      double f_minus = weighted();
      param = saved;
      if (kink_p < kink_margin || kink_m < kink_margin) {
        ++skipped;
        return;
      }
      double fd = (f_plus - f_minus) / (2.0 * fd_eps);
      double rel =
          std::abs(agrad - fd) / std::max({std::abs(agrad), std::abs(fd), 1e-6});
      worst_rel = std::max(worst_rel, rel);
      ++checked;
    };
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      for (std::size_t k = 0; k < net.weights[l].data.size(); ++k) {
        probe(net.weights[l].data[k], analytic.weights[l].data[k]);
      }
      for (std::size_t k = 0; k < net.biases[l].size(); ++k) {
        probe(net.biases[l][k], analytic.biases[l][k]);
      }
    }
  }
  double elapsed = seconds_since(start);
  result.pass = worst_rel <= 1e-4 && elapsed <= 10.0 && checked > 5000;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "max rel err %.3g over %ld params (%ld kink-skipped) in %.2fs",
                worst_rel, checked, skipped, elapsed);
  result.detail = buf;
  return result;
}

// ---------------------------------------------------------------- criterion 4

std::vector<CandidateAbstraction> oracle_mine(
    const std::vector<std::vector<int>>& sequences, int min_len, int max_len) {
  std::vector<std::vector<int>> keys;
  std::vector<int> freqs;
  for (const auto& seq : sequences) {
    std::vector<std::vector<int>> here;
    for (std::size_t start = 0; start < seq.size(); ++start) {
      for (std::size_t stop = start + static_cast<std::size_t>(min_len);
           stop <= seq.size() && stop - start <= static_cast<std::size_t>(max_len);
           ++stop) {
        std::vector<int> sub(seq.begin() + static_cast<long>(start),
                             seq.begin() + static_cast<long>(stop));
        if (std::find(here.begin(), here.end(), sub) == here.end()) here.push_back(sub);
      }
    }
    for (const auto& sub : here) {
      auto it = std::find(keys.begin(), keys.end(), sub);
      if (it == keys.end()) {
        keys.push_back(sub);
        freqs.push_back(1);
      } else {
        ++freqs[static_cast<std::size_t>(it - keys.begin())];
      }
    }
  }
  std::vector<CandidateAbstraction> out;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    out.push_back(CandidateAbstraction{
        keys[i], freqs[i],
        static_cast<double>(freqs[i]) * (static_cast<double>(keys[i].size()) - 1.0)});
  }
  std::sort(out.begin(), out.end(),
            [](const CandidateAbstraction& a, const CandidateAbstraction& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.sequence.size() != b.sequence.size()) {
                return a.sequence.size() > b.sequence.size();
              }
              return a.sequence < b.sequence;
            });
  return out;
}

CriterionResult criterion_miner_oracle() {
  CriterionResult result{4, false, ""};
  auto start = std::chrono::steady_clock::now();
  Rng rng(0xfeed);
  long instances = 0;
  for (int trial = 0; trial < 500; ++trial) {
    int n_seq = 1 + static_cast<int>(rng.next_index(20));
    std::vector<std::vector<int>> sequences;
    for (int s = 0; s < n_seq; ++s) {
      int len = static_cast<int>(rng.next_index(11));
      std::vector<int> seq;
      for (int i = 0; i < len; ++i) seq.push_back(static_cast<int>(rng.next_index(14)));
      sequences.push_back(std::move(seq));
    }
    int min_len = 2 + static_cast<int>(rng.next_index(2));
    int max_len = min_len + static_cast<int>(rng.next_index(5));
    auto fast = mine(sequences, min_len, max_len);
    auto slow = oracle_mine(sequences, min_len, max_len);
    if (fast.size() != slow.size()) {
      result.detail = "ranking size mismatch";
      return result;
    }
    for (std::size_t i = 0; i < fast.size(); ++i) {
      if (fast[i].sequence != slow[i].sequence ||
          fast[i].frequency != slow[i].frequency || fast[i].score != slow[i].score) {
        result.detail = "ranking mismatch at instance " + std::to_string(trial);
        return result;
      }
    }
    ++instances;
  }
  double elapsed = seconds_since(start);
  result.pass = instances == 500 && elapsed <= 10.0;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "500 instances, exact ranking match, %.2fs", elapsed);
  result.detail = buf;
  return result;
}

// ---------------------------------------------------------------- criterion 5

CriterionResult criterion_dream_properties() {
  CriterionResult result{5, false, ""};
  Rng rng(90210);
  long episodes_checked = 0;
  long strict_checked = 0;
  while (episodes_checked < 200) {
    Lexicon lexicon(40);
    int distinct = 1 + static_cast<int>(rng.next_index(3));
    std::vector<std::pair<Grid, std::vector<int>>> pool;
    for (int d = 0; d < distinct; ++d) {
      int blocks = 2 + static_cast<int>(rng.next_index(3));
      pool.push_back(random_goal_build(rng, blocks));
    }
    std::vector<std::pair<Grid, std::vector<int>>> episodes;
    for (const auto& entry : pool) {
      int copies = 1 + static_cast<int>(rng.next_index(4));
      for (int c = 0; c < copies; ++c) episodes.push_back(entry);
    }
    std::vector<std::vector<int>> sequences;
    for (const auto& [_, build] : episodes) sequences.push_back(build);
    auto ranked = mine(sequences, 2, 6);
    if (ranked.empty()) continue;
    const auto& candidate =
        ranked[rng.next_index(std::min<std::size_t>(5, ranked.size()))];
    int a = lexicon.add_abstraction(candidate.sequence);
    for (const auto& [goal, build] : episodes) {
      auto original = replay_with_rewrite(goal, build, lexicon, 0);
      auto rewritten_seq = rewrite_episode(build, a, lexicon);
      auto rewritten = replay_with_rewrite(goal, rewritten_seq, lexicon, 1);
      double before = 0.0, after = 0.0;
      for (const auto& t : original) before += t.reward;
      for (const auto& t : rewritten) after += t.reward;
      if (rewritten.back().next_state != original.back().next_state) {
        result.detail = "final grid mismatch";
        return result;
      }
      if (after < before - 1e-15) {
        result.detail = "return dropped after rewrite";
        return result;
      }
      if (rewritten_seq != build) {
        // completion moved strictly earlier, so the return must strictly rise
        if (!(after > before)) {
          result.detail = "no strict gain despite replacement";
          return result;
        }
        ++strict_checked;
      }
      ++episodes_checked;
    }
  }
  result.pass = strict_checked > 0;
  result.detail = std::to_string(episodes_checked) + " episodes, " +
                  std::to_string(strict_checked) + " with strict dominance";
  return result;
}

// ---------------------------------------------------------------- criterion 6

CriterionResult criterion_abstraction_usage() {
  CriterionResult result{6, false, ""};
  auto start = std::chrono::steady_clock::now();

  auto catalog = ShapeCatalog::builtin_default();
  Grid goal = catalog.find("U1")->goal;
  std::vector<int> build{0, 1, 6};  // V1 V2 H1

  ExperimentConfig cfg;  // artifact defaults except the desk-scale width
  cfg.hidden_dim = 64;
  Rng rng(6);
  auto net = make_architect_network(cfg.m_max, rng, cfg.hidden_dim);
  auto target = sync_target(net);
  auto optimizer = Optimizer::make(parse_optimizer_kind(cfg.optimizer),
                                   cfg.learning_rate, net);
  Lexicon lexicon(cfg.m_max);
  ReplayBuffer buffer(static_cast<std::size_t>(cfg.replay_capacity), 256);

  // a buffer of identical successful episodes
  std::vector<EpisodeMeta> metas;
  for (int e = 0; e < 10; ++e) {
    long id = buffer.begin_episode();
    for (const Transition& t : replay_with_rewrite(goal, build, lexicon, id)) {
      buffer.push(t);
    }
    buffer.record_episode(EpisodeMeta{id, goal, build, true});
  }

  // sleep: mine + promote the common build
  auto ranked = mine(collect_sequences(buffer, cfg.window), cfg.min_len, cfg.max_len);
  if (ranked.empty()) {
    result.detail = "nothing mined";
    return result;
  }
  auto promoted = promote(lexicon, ranked.front(), cfg.score_threshold);
  if (!promoted.promoted()) {
    result.detail = "top candidate not promoted";
    return result;
  }
  int a = *promoted.new_id;

  // dream: rewrite, replay, focused training
  std::vector<Transition> rewritten;
  for (const EpisodeMeta& e : buffer.episodes()) {
    auto seq = rewrite_episode(e.messages, a, lexicon);
    long id = buffer.begin_episode();
    auto transitions = replay_with_rewrite(e.goal, seq, lexicon, id);
    rewritten.insert(rewritten.end(), transitions.begin(), transitions.end());
  }
  target = sync_target(net);
  optimizer.learning_rate = cfg.dream_learning_rate;
  Rng dream_rng(60);
  dream_train(net, target, rewritten, optimizer, cfg.dream_iterations, cfg.batch_size,
              cfg.gamma, lexicon, dream_rng, buffer);

  Rng greedy(1);
  int choice = select_message(net, goal, Grid{}, lexicon, 0.0, greedy);
  double elapsed = seconds_since(start);
  result.pass = choice == a && elapsed <= 30.0;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "greedy chose %s (want %s) in %.2fs",
                lexicon.name(choice).c_str(), lexicon.name(a).c_str(), elapsed);
  result.detail = buf;
  return result;
}

// ---------------------------------------------------------------- criterion 7

CriterionResult criterion_determinism() {
  CriterionResult result{7, false, ""};
  auto catalog_path = desk_catalog_file().string();
  ExperimentConfig cfg = desk_config(Mode::full, 21, catalog_path);
  cfg.pretrain_epochs = 60;
  cfg.max_epochs = 240;
  cfg.wake_phase_len = 60;
  cfg.eval_interval = 40;
  cfg.hidden_dim = 24;
  cfg.batch_size = 16;
  cfg.dream_iterations = 100;

  auto dir_a = fresh_dir("det_a");
  auto dir_b = fresh_dir("det_b");
  Experiment(cfg, dir_a).run();
  Experiment(cfg, dir_b).run();
  bool identical = slurp(dir_a / "metrics.csv") == slurp(dir_b / "metrics.csv") &&
                   slurp(dir_a / "events.csv") == slurp(dir_b / "events.csv");

  // snapshot mid-run, restore into a fresh experiment, compare the tail
  auto dir_half = fresh_dir("det_half");
  Experiment half(cfg, dir_half);
  for (int i = 0; i < 150; ++i) half.step_epoch();
  auto snap = work_dir() / "det_snapshot.json";
  half.save_state(snap);
  auto dir_cont = fresh_dir("det_cont");
  Experiment cont(cfg, dir_cont);
  cont.load_state(snap);
  cont.run();

  std::istringstream ref(slurp(dir_a / "metrics.csv"));
  std::vector<std::string> ref_rows;
  std::string line;
  while (std::getline(ref, line)) ref_rows.push_back(line);
  std::istringstream tail(slurp(dir_cont / "metrics.csv"));
  std::vector<std::string> tail_rows;
  while (std::getline(tail, line)) tail_rows.push_back(line);
  bool tail_ok = tail_rows.size() > 1 && ref_rows.size() == 150 + tail_rows.size();
  if (tail_ok) {
    for (std::size_t i = 1; i < tail_rows.size(); ++i) {
      if (tail_rows[i] != ref_rows[150 + i]) {
        tail_ok = false;
        break;
      }
    }
  }
  result.pass = identical && tail_ok;
  result.detail = std::string("byte-identical csv: ") + (identical ? "yes" : "NO") +
                  ", resumed tail identical: " + (tail_ok ? "yes" : "NO");
  return result;
}

// ---------------------------------------------------------------- criterion 8

CriterionResult criterion_catalog_integrity() {
  CriterionResult result{8, false, ""};
  auto catalog = ShapeCatalog::builtin_default();
  std::map<std::string, int> families;
  bool ok = catalog.size() == 11;
  std::set<std::uint64_t> distinct;
  for (const Shape& s : catalog.shapes()) {
    ++families[shape_family(s.name)];
    distinct.insert(s.goal.mask());
    auto check = validate_buildable(s.goal);
    if (!check.buildable ||
        static_cast<int>(check.witness.size()) != s.min_primitives) {
      ok = false;
      break;
    }
    Grid g;
    for (int id : check.witness) {
      g = place_block(g, primitive_action(id)).new_grid;
      if (unreachable(g, s.goal)) ok = false;
    }
    if (g != s.goal) ok = false;
    if (2 * s.min_primitives != s.goal.count()) ok = false;  // BFS minimality
  }
  ok = ok && families["U"] == 3 && families["C"] == 5 && families["L"] == 3;
  ok = ok && distinct.size() == 11;
  result.pass = ok;
  result.detail = "11 shapes (3 U / 5 C / 3 L), all with BFS-verified builds";
  return result;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--only" && i + 1 < argc) {
      std::istringstream in(argv[++i]);
      std::string tok;
      while (std::getline(in, tok, ',')) only.insert(std::stoi(tok));
    }
  }
  auto want = [&](int n) { return only.empty() || only.contains(n); };

  std::vector<CriterionResult> results;
  if (want(2)) results.push_back(criterion_reward_exactness());
  if (want(3)) results.push_back(criterion_gradients());
  if (want(4)) results.push_back(criterion_miner_oracle());
  if (want(5)) results.push_back(criterion_dream_properties());
  if (want(8)) results.push_back(criterion_catalog_integrity());
  if (want(6)) results.push_back(criterion_abstraction_usage());
  if (want(7)) results.push_back(criterion_determinism());
  if (want(1)) results.push_back(criterion_mode_ordering());

  std::sort(results.begin(), results.end(),
            [](const CriterionResult& a, const CriterionResult& b) {
              return a.number < b.number;
            });
  static const char* kNames[] = {
      "",
      "mode ordering best < full < worst (desk scale)",
      "reward exactness",
      "gradient correctness vs finite differences",
      "miner oracle equivalence",
      "dream rewrite properties",
      "abstraction usage after promotion + dream",
      "determinism and snapshot resume",
      "catalog integrity",
  };
  bool all = true;
  for (const CriterionResult& r : results) {
    all = all && r.pass;
    std::printf("[%s] criterion %d: %s — %s\n", r.pass ? "PASS" : "FAIL", r.number,
                kNames[r.number], r.detail.c_str());
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
