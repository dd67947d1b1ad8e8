#pragma once

#include <algorithm>
#include <vector>

#include "archbuild/agent.hpp"
#include "archbuild/env.hpp"
#include "archbuild/message.hpp"
#include "archbuild/replay.hpp"

namespace archbuild {

/// Greedy leftmost non-overlapping replacement of the abstraction's defining
/// sequence, repeated until a fixpoint (later promotions can then rewrite
/// over earlier abstraction ids).
inline std::vector<int> rewrite_episode(const std::vector<int>& messages,
                                        int abstraction_id, const Lexicon& lexicon) {
  const std::vector<int>& pattern = lexicon.message(abstraction_id).children;
  std::vector<int> current = messages;
  for (;;) {
    std::vector<int> next;
    next.reserve(current.size());
    bool changed = false;
    std::size_t i = 0;
    while (i < current.size()) {
      if (i + pattern.size() <= current.size() &&
          std::equal(pattern.begin(), pattern.end(), current.begin() + i)) {
        next.push_back(abstraction_id);
        i += pattern.size();
        changed = true;
      } else {
        next.push_back(current[i]);
        ++i;
      }
    }
    current = std::move(next);
    if (!changed) return current;
  }
}

/// Re-execute a rewritten message sequence from the empty grid with fresh
/// time indices; rewards come out larger where completion moved earlier.
inline std::vector<Transition> replay_with_rewrite(Grid goal,
                                                   const std::vector<int>& messages,
                                                   const Lexicon& lexicon,
                                                   long episode_id,
                                                   int budget = kMessageBudget) {
  std::vector<Transition> transitions;
  transitions.reserve(messages.size());
  Grid state;
  int t = 0;
  for (int message_id : messages) {
    StepResult sr = step(state, goal, message_id, lexicon, t, budget);
    transitions.push_back(Transition{goal, state, message_id, sr.reward, sr.next_state,
                                     sr.terminal, t, episode_id});
    state = sr.next_state;
    ++t;
  }
  return transitions;
}

/// Focused training on the rewritten transitions only, then merge them into
/// the main replay buffer. Returns the loss trace.
inline std::vector<double> dream_train(FeedForwardNet& net,
                                       const FeedForwardNet& target_net,
                                       const std::vector<Transition>& transitions,
                                       Optimizer& optimizer, long iterations,
                                       int batch_size, double gamma,
                                       const Lexicon& lexicon, Rng& rng,
                                       ReplayBuffer& buffer,
                                       BatchScratch* scratch = nullptr) {
  std::vector<double> losses;
  if (!transitions.empty()) {
    losses.reserve(static_cast<std::size_t>(iterations));
    auto pick = [&]() -> const Transition& {
      return transitions[rng.next_index(transitions.size())];
    };
    for (long it = 0; it < iterations; ++it) {
      losses.push_back(train_minibatch(net, target_net, pick, batch_size, gamma,
                                       lexicon, optimizer, scratch));
    }
  }
  for (const Transition& tr : transitions) buffer.push(tr);
  return losses;
}

}  // namespace archbuild
