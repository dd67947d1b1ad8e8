#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "archbuild/message.hpp"
#include "archbuild/replay.hpp"

namespace archbuild {

struct CandidateAbstraction {
  std::vector<int> sequence;
  int frequency = 0;   // episodes containing the substring at least once
  double score = 0.0;  // frequency * (length - 1)
};

/// Message sequences of the most recent `window` successful episodes, in
/// chronological order.
inline std::vector<std::vector<int>> collect_sequences(const ReplayBuffer& buffer,
                                                       int window) {
  std::vector<std::vector<int>> out;
  const auto& episodes = buffer.episodes();
  for (auto it = episodes.rbegin();
       it != episodes.rend() && static_cast<int>(out.size()) < window; ++it) {
    if (it->success) out.push_back(it->messages);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

/// Enumerate every contiguous substring with length in [min_len, max_len],
/// count each once per episode, score by frequency * (length - 1), and rank
/// by score desc, then length desc, then lexicographic id order asc. The
/// three-level tie-break is total: equal score and length forces distinct
/// id sequences.
inline std::vector<CandidateAbstraction> mine(
    const std::vector<std::vector<int>>& sequences, int min_len = 2, int max_len = 6) {
  std::map<std::vector<int>, int> frequency;
  for (const auto& seq : sequences) {
    std::set<std::vector<int>> seen;
    int n = static_cast<int>(seq.size());
    for (int start = 0; start < n; ++start) {
      for (int len = min_len; len <= max_len && start + len <= n; ++len) {
        seen.insert(std::vector<int>(seq.begin() + start, seq.begin() + start + len));
      }
    }
    for (const auto& sub : seen) ++frequency[sub];
  }
  std::vector<CandidateAbstraction> ranked;
  ranked.reserve(frequency.size());
  for (const auto& [sub, freq] : frequency) {
    ranked.push_back(CandidateAbstraction{
        sub, freq, static_cast<double>(freq) * (static_cast<double>(sub.size()) - 1.0)});
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const CandidateAbstraction& a, const CandidateAbstraction& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.sequence.size() != b.sequence.size()) {
                return a.sequence.size() > b.sequence.size();
              }
              return a.sequence < b.sequence;
            });
  return ranked;
}

enum class NoPromotionReason { below_threshold, lexicon_full, duplicate };

struct PromotionResult {
  std::optional<int> new_id;
  std::optional<NoPromotionReason> reason;
  bool promoted() const { return new_id.has_value(); }
};

/// Append the candidate as a new abstraction when it clears the threshold,
/// a slot is free and the identical sequence is not already defined.
/// NoPromotion is a value, not an error.
inline PromotionResult promote(Lexicon& lexicon, const CandidateAbstraction& candidate,
                               double score_threshold) {
  if (candidate.score < score_threshold) {
    return {std::nullopt, NoPromotionReason::below_threshold};
  }
  if (lexicon.full()) return {std::nullopt, NoPromotionReason::lexicon_full};
  if (lexicon.find_abstraction(candidate.sequence)) {
    return {std::nullopt, NoPromotionReason::duplicate};
  }
  return {lexicon.add_abstraction(candidate.sequence), std::nullopt};
}

}  // namespace archbuild
