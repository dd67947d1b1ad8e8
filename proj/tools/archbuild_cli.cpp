// Command-line front end: train / eval / mine / report.
//
// Exit codes: 0 success, 1 config or parse errors, 2 I/O errors.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "archbuild/checkpoint.hpp"
#include "archbuild/config.hpp"
#include "archbuild/experiment.hpp"
#include "archbuild/miner.hpp"
#include "archbuild/report.hpp"
#include "archbuild/shapes.hpp"

namespace {

using namespace archbuild;

void print_summary(const RunSummary& summary) {
  std::cout << "run " << summary.run_dir.string() << ": mode=" << mode_name(summary.mode)
            << " seed=" << summary.seed;
  if (summary.epochs_to_solve) {
    std::cout << " epochs_to_solve=" << *summary.epochs_to_solve;
  } else {
    std::cout << " DNF at " << summary.wake_epochs;
  }
  std::cout << " promotions=" << summary.promotions << "\n";
}

int cmd_train(const std::string& config_path, const std::string& mode,
              std::optional<long> seed, const std::string& out,
              std::optional<long> max_epochs, int replicas) {
  ExperimentConfig base =
      config_path.empty() ? ExperimentConfig{} : load_config(config_path);
  if (!mode.empty()) base.mode = parse_mode(mode);
  if (seed) base.seed = *seed;
  if (!out.empty()) base.out = out;
  if (max_epochs) base.max_epochs = *max_epochs;
  if (base.out.empty()) {
    throw ConfigError("no output directory: pass --out or set 'out' in the config");
  }
  base.validate();
  if (replicas < 1) throw ConfigError("--replicas must be >= 1");

  if (replicas == 1) {
    Experiment experiment(base, base.out);
    print_summary(experiment.run());
    return 0;
  }
  // Independent seeded replicas; nothing is shared, each writes its own
  // subdirectory.
  std::vector<RunSummary> summaries(static_cast<std::size_t>(replicas));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(replicas));
  std::vector<std::thread> workers;
  for (int r = 0; r < replicas; ++r) {
    workers.emplace_back([&, r] {
      try {
        ExperimentConfig cfg = base;
        cfg.seed = base.seed + r;
        std::filesystem::path dir =
            std::filesystem::path(base.out) / ("seed" + std::to_string(cfg.seed));
        Experiment experiment(cfg, dir);
        summaries[static_cast<std::size_t>(r)] = experiment.run();
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const RunSummary& s : summaries) print_summary(s);
  return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& shapes_path) {
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  if (ckpt.net.input_size() != kNetInputSize) {
    throw DimensionMismatch("checkpoint input width " +
                            std::to_string(ckpt.net.input_size()) + ", expected " +
                            std::to_string(kNetInputSize));
  }
  if (ckpt.net.output_size() != ckpt.lexicon.m_max()) {
    throw DimensionMismatch("checkpoint output width does not match lexicon m_max");
  }
  ShapeCatalog catalog = shapes_path.empty() ? ShapeCatalog::builtin_default()
                                             : ShapeCatalog::load(shapes_path);
  auto results = evaluate(ckpt.net, ckpt.lexicon, catalog);
  int passed = 0;
  for (const Shape& shape : catalog.shapes()) {
    bool ok = results.at(shape.name);
    passed += ok ? 1 : 0;
    std::cout << shape.name << ": " << (ok ? "success" : "fail") << "\n";
  }
  std::cout << passed << "/" << catalog.size() << " shapes built\n";
  return 0;
}

int cmd_mine(const std::string& episodes_path, int min_len, int max_len, int window) {
  std::ifstream in(episodes_path);
  if (!in) throw IOError("cannot open episode log: " + episodes_path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty episode log");
  if (trim(line) != "episode_id,step,message_id") {
    throw ParseError("episode log must start with 'episode_id,step,message_id'");
  }
  // Episodes appear in first-seen order; steps are ordered within an episode.
  std::vector<std::pair<long, std::vector<std::pair<long, int>>>> episodes;
  std::map<long, std::size_t> index;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = csv_split(line);
    if (fields.size() != 3) {
      throw ParseError(episodes_path + ":" + std::to_string(line_no) +
                       ": expected 3 fields");
    }
    long episode = parse_long(fields[0]);
    long step_no = parse_long(fields[1]);
    int message = static_cast<int>(parse_long(fields[2]));
    auto [it, fresh] = index.try_emplace(episode, episodes.size());
    if (fresh) episodes.push_back({episode, {}});
    episodes[it->second].second.push_back({step_no, message});
  }
  std::vector<std::vector<int>> sequences;
  std::size_t first = window > 0 && static_cast<std::size_t>(window) < episodes.size()
                          ? episodes.size() - static_cast<std::size_t>(window)
                          : 0;
  for (std::size_t i = first; i < episodes.size(); ++i) {
    auto& steps = episodes[i].second;
    std::stable_sort(steps.begin(), steps.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<int> seq;
    for (const auto& [_, message] : steps) seq.push_back(message);
    sequences.push_back(std::move(seq));
  }
  auto ranked = mine(sequences, min_len, max_len);
  std::cout << "rank,score,frequency,length,sequence\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const CandidateAbstraction& c = ranked[i];
    std::cout << (i + 1) << ',' << format_double(c.score) << ',' << c.frequency << ','
              << c.sequence.size() << ',';
    for (std::size_t k = 0; k < c.sequence.size(); ++k) {
      if (k > 0) std::cout << '+';
      std::cout << message_name(c.sequence[k]);
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_report(const std::string& run_dir) {
  std::cout << make_report(run_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"block-construction communication agents: train, evaluate, mine, report"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "run seeded training");
  std::string train_config, train_mode, train_out;
  std::optional<long> train_seed, train_max_epochs;
  int train_replicas = 1;
  train->add_option("--config", train_config, "config file (key = value lines)");
  train->add_option("--mode", train_mode, "worst | best | full");
  train->add_option("--seed", train_seed, "rng seed");
  train->add_option("--out", train_out, "output run directory");
  train->add_option("--replicas", train_replicas, "independent seeded runs");
  train->add_option("--max-epochs", train_max_epochs, "wake epoch cap");

  auto* eval = app.add_subcommand("eval", "greedy rollout per catalog shape");
  std::string eval_checkpoint, eval_shapes;
  eval->add_option("--checkpoint", eval_checkpoint, "checkpoint file")->required();
  eval->add_option("--shapes", eval_shapes, "shape file (default: builtin catalog)");

  auto* mine_cmd = app.add_subcommand("mine", "rank substring candidates offline");
  std::string mine_episodes;
  int mine_min = 2, mine_max = 6, mine_window = 0;
  mine_cmd->add_option("--episodes", mine_episodes, "episode log csv")->required();
  mine_cmd->add_option("--min-len", mine_min, "minimum substring length");
  mine_cmd->add_option("--max-len", mine_max, "maximum substring length");
  mine_cmd->add_option("--window", mine_window, "use only the last W episodes (0 = all)");

  auto* report = app.add_subcommand("report", "summarize a finished or partial run");
  std::string report_run;
  report->add_option("--run", report_run, "run directory")->required();

  try {
    app.parse(argc, argv);
    if (train->parsed()) {
      return cmd_train(train_config, train_mode, train_seed, train_out,
                       train_max_epochs, train_replicas);
    }
    if (eval->parsed()) return cmd_eval(eval_checkpoint, eval_shapes);
    if (mine_cmd->parsed()) return cmd_mine(mine_episodes, mine_min, mine_max, mine_window);
    if (report->parsed()) return cmd_report(report_run);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const IOError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 2;
  } catch (const MissingRun& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
