#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "archbuild/errors.hpp"
#include "archbuild/textio.hpp"

namespace archbuild {

struct MetricsRecord {
  long epoch = 0;
  std::string phase;  // pretrain | wake
  std::string goal;
  bool success = false;
  int steps = 0;
  double episode_return = 0.0;
  double epsilon = 0.0;
  int lexicon_size = 0;
  double mean_loss = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "epoch,phase,goal,success,steps,return,epsilon,lexicon_size,mean_loss";
inline constexpr const char* kEventsHeader = "epoch,event,detail";

/// One row per training episode, appended as the run progresses.
class MetricsWriter {
 public:
  MetricsWriter() = default;

  explicit MetricsWriter(const std::filesystem::path& path) { open(path); }

  void open(const std::filesystem::path& path) {
    out_.open(path, std::ios::trunc);
    if (!out_) throw IOError("cannot open metrics file: " + path.string());
    out_ << kMetricsHeader << "\n";
  }

  void write(const MetricsRecord& r) {
    out_ << r.epoch << ',' << r.phase << ',' << r.goal << ',' << (r.success ? 1 : 0)
         << ',' << r.steps << ',' << format_double(r.episode_return) << ','
         << format_double(r.epsilon) << ',' << r.lexicon_size << ','
         << format_double(r.mean_loss) << '\n';
  }

  void flush() { out_.flush(); }
  bool is_open() const { return out_.is_open(); }
  void close() { if (out_.is_open()) out_.close(); }

 private:
  std::ofstream out_;
};

/// epoch,event,detail with event in {promotion, dream_start, dream_end,
/// eval_pass, solve}; the detail field is always quoted.
class EventsWriter {
 public:
  EventsWriter() = default;

  explicit EventsWriter(const std::filesystem::path& path) { open(path); }

  void open(const std::filesystem::path& path) {
    out_.open(path, std::ios::trunc);
    if (!out_) throw IOError("cannot open events file: " + path.string());
    out_ << kEventsHeader << "\n";
  }

  void write(long epoch, const std::string& event, const std::string& detail) {
    out_ << epoch << ',' << event << ',' << csv_quote(detail) << '\n';
  }

  void flush() { out_.flush(); }
  bool is_open() const { return out_.is_open(); }
  void close() { if (out_.is_open()) out_.close(); }

 private:
  std::ofstream out_;
};

}  // namespace archbuild
