#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "archbuild/errors.hpp"
#include "archbuild/message.hpp"
#include "archbuild/textio.hpp"

namespace archbuild {

struct RunReportData {
  std::map<std::string, std::string> config;
  std::optional<long> epochs_to_solve;
  long max_wake_epoch = 0;
  std::vector<std::pair<long, std::string>> promotions;  // epoch, detail
  std::vector<long> bucket_success;                      // per 10k wake epochs
  std::vector<long> bucket_total;
};

inline constexpr long kReportBucket = 10000;

inline RunReportData parse_run(const std::filesystem::path& run_dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(run_dir / "metrics.csv") || !fs::exists(run_dir / "events.csv")) {
    throw MissingRun("no run found in " + run_dir.string() +
                     " (expected metrics.csv and events.csv)");
  }
  RunReportData data;
  if (std::ifstream cfg{run_dir / "run_config.txt"}) {
    std::string line;
    while (std::getline(cfg, line)) {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      data.config[std::string(trim(line.substr(0, eq)))] =
          std::string(trim(line.substr(eq + 1)));
    }
  }
  {
    std::ifstream metrics(run_dir / "metrics.csv");
    std::string line;
    bool first = true;
    while (std::getline(metrics, line)) {
      if (first) {
        first = false;
        continue;
      }
      auto fields = csv_split(line);
      if (fields.size() < 9 || fields[1] != "wake") continue;
      long epoch = parse_long(fields[0]);
      data.max_wake_epoch = std::max(data.max_wake_epoch, epoch);
      std::size_t bucket = static_cast<std::size_t>((epoch - 1) / kReportBucket);
      if (data.bucket_total.size() <= bucket) {
        data.bucket_total.resize(bucket + 1, 0);
        data.bucket_success.resize(bucket + 1, 0);
      }
      ++data.bucket_total[bucket];
      if (fields[3] == "1") ++data.bucket_success[bucket];
    }
  }
  {
    std::ifstream events(run_dir / "events.csv");
    std::string line;
    bool first = true;
    while (std::getline(events, line)) {
      if (first) {
        first = false;
        continue;
      }
      auto fields = csv_split(line);
      if (fields.size() < 3) continue;
      long epoch = parse_long(fields[0]);
      if (fields[1] == "promotion") {
        data.promotions.emplace_back(epoch, fields[2]);
      } else if (fields[1] == "solve") {
        auto eq = fields[2].find('=');
        if (eq != std::string::npos) {
          data.epochs_to_solve = parse_long(fields[2].substr(eq + 1));
        }
      }
    }
  }
  return data;
}

inline std::string render_report(const std::filesystem::path& run_dir,
                                 const RunReportData& data) {
  std::ostringstream out;
  auto cfg = [&](const char* key) {
    auto it = data.config.find(key);
    return it == data.config.end() ? std::string("?") : it->second;
  };
  out << "run: " << run_dir.string() << "\n";
  out << "mode: " << cfg("mode") << "\n";
  out << "seed: " << cfg("seed") << "\n";
  if (data.epochs_to_solve) {
    out << "epochs_to_solve: " << *data.epochs_to_solve << "\n";
  } else {
    out << "epochs_to_solve: DNF at " << cfg("max_epochs") << "\n";
  }
  out << "abstractions:\n";
  if (data.promotions.empty()) {
    out << "  (none)\n";
  } else {
    for (const auto& [epoch, detail] : data.promotions) {
      out << "  epoch " << epoch << ": " << detail << "\n";
    }
  }
  out << "final lexicon: ";
  for (int id = 0; id < kPrimitiveCount; ++id) {
    if (id > 0) out << ' ';
    out << message_name(id);
  }
  for (const auto& [epoch, detail] : data.promotions) {
    out << ' ' << detail.substr(0, detail.find(';'));
  }
  out << "\n";
  out << "success rate per " << kReportBucket << " wake epochs:\n";
  static const char* kBars[] = {" ", "▁", "▂", "▃",
                                "▄", "▅", "▆", "▇", "█"};
  for (std::size_t b = 0; b < data.bucket_total.size(); ++b) {
    if (data.bucket_total[b] == 0) continue;
    double rate = static_cast<double>(data.bucket_success[b]) /
                  static_cast<double>(data.bucket_total[b]);
    int level = static_cast<int>(rate * 8.0 + 0.5);
    char linebuf[96];
    std::snprintf(linebuf, sizeof(linebuf), "  %7ld-%-7ld %6.1f%% ",
                  static_cast<long>(b) * kReportBucket + 1,
                  (static_cast<long>(b) + 1) * kReportBucket, rate * 100.0);
    out << linebuf << kBars[level] << "\n";
  }
  return out.str();
}

inline std::string make_report(const std::filesystem::path& run_dir) {
  return render_report(run_dir, parse_run(run_dir));
}

}  // namespace archbuild
