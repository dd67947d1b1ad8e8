#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "archbuild/env.hpp"
#include "archbuild/errors.hpp"
#include "archbuild/nn.hpp"
#include "archbuild/replay.hpp"
#include "archbuild/rng.hpp"

namespace archbuild {

/// Network input: 36 goal cells then 36 state cells, row-major from the
/// bottom row up.
inline std::array<double, kNetInputSize> encode_input(Grid goal, Grid state) {
  std::array<double, kNetInputSize> input{};
  for (int i = 0; i < kCellCount; ++i) {
    input[static_cast<std::size_t>(i)] = (goal.mask() >> i) & 1u ? 1.0 : 0.0;
    input[static_cast<std::size_t>(kCellCount + i)] =
        (state.mask() >> i) & 1u ? 1.0 : 0.0;
  }
  return input;
}

/// Epsilon-greedy over the legal message set. Greedy takes the masked argmax
/// (illegal and inactive ids are excluded outright, ties go to the lowest id).
/// Draws from `rng` only when epsilon > 0, so greedy evaluation rollouts do
/// not disturb the training stream.
inline int select_message(const FeedForwardNet& net, Grid goal, Grid state,
                          const Lexicon& lexicon, double epsilon, Rng& rng) {
  auto heights = state.column_heights();
  std::vector<int> legal;
  legal.reserve(static_cast<std::size_t>(lexicon.active_count()));
  for (int id = 0; id < lexicon.active_count(); ++id) {
    if (message_legal(heights, lexicon, id)) legal.push_back(id);
  }
  if (legal.empty()) throw NoLegalMessage("no legal message in this state");
  if (epsilon > 0.0 && rng.next_double() < epsilon) {
    return legal[rng.next_index(legal.size())];
  }
  std::vector<double> q = net.forward(encode_input(goal, state));
  int best = legal.front();
  double best_q = q[static_cast<std::size_t>(best)];
  for (int id : legal) {
    double value = q[static_cast<std::size_t>(id)];
    if (value > best_q) {
      best = id;
      best_q = value;
    }
  }
  return best;
}

/// r for terminal transitions, else r + gamma * max over messages that are
/// active and legal in the next state (0 bootstrap if none).
inline double td_target(const Transition& tr, const FeedForwardNet& target_net,
                        const Lexicon& lexicon, double gamma) {
  if (tr.terminal) return tr.reward;
  std::vector<double> q = target_net.forward(encode_input(tr.goal, tr.next_state));
  auto best = best_legal(q, tr.next_state.column_heights(), lexicon);
  return tr.reward + gamma * (best ? best->second : 0.0);
}

/// Reusable workspace for mini-batch updates.
struct BatchScratch {
  Gradients grads;
  ForwardTrace trace;
  std::vector<double> out_grad;
  bool ready = false;

  void prepare(const FeedForwardNet& net) {
    if (!ready || !grads.shape_matches(net)) {
      grads = Gradients::like(net);
      ready = true;
    } else {
      grads.zero();
    }
    out_grad.assign(static_cast<std::size_t>(net.output_size()), 0.0);
  }
};

/// One DQN update on a mini-batch provided by `pick`. Loss is the mean
/// squared error between Q(state)[chosen] and the TD target; gradients flow
/// only through the chosen-message output.
template <typename PickFn>
double train_minibatch(FeedForwardNet& net, const FeedForwardNet& target_net,
                       PickFn&& pick, int batch_size, double gamma,
                       const Lexicon& lexicon, Optimizer& optimizer,
                       BatchScratch* scratch = nullptr) {
  BatchScratch local;
  BatchScratch& ws = scratch ? *scratch : local;
  ws.prepare(net);
  double loss = 0.0;
  double inv_batch = 1.0 / static_cast<double>(batch_size);
  for (int b = 0; b < batch_size; ++b) {
    const Transition& tr = pick();
    forward_trace(net, encode_input(tr.goal, tr.state), ws.trace);
    const std::vector<double>& q = ws.trace.acts.back();
    double target = td_target(tr, target_net, lexicon, gamma);
    double diff = q[static_cast<std::size_t>(tr.message_id)] - target;
    loss += diff * diff;
    std::fill(ws.out_grad.begin(), ws.out_grad.end(), 0.0);
    ws.out_grad[static_cast<std::size_t>(tr.message_id)] = 2.0 * diff * inv_batch;
    backward(net, ws.trace, ws.out_grad, ws.grads);
  }
  optimizer.apply(net, ws.grads);
  return loss * inv_batch;
}

/// Uniform mini-batch from the replay buffer (sampled with replacement).
inline double train_step(FeedForwardNet& net, const FeedForwardNet& target_net,
                         const ReplayBuffer& buffer, Optimizer& optimizer,
                         int batch_size, double gamma, const Lexicon& lexicon,
                         Rng& rng, BatchScratch* scratch = nullptr) {
  if (buffer.size() < static_cast<std::size_t>(batch_size)) {
    throw BufferTooSmall("replay buffer has " + std::to_string(buffer.size()) +
                         " transitions, batch needs " + std::to_string(batch_size));
  }
  auto pick = [&]() -> const Transition& { return buffer[rng.next_index(buffer.size())]; };
  return train_minibatch(net, target_net, pick, batch_size, gamma, lexicon, optimizer,
                         scratch);
}

/// Deep copy; training the online net afterwards leaves the copy untouched.
inline FeedForwardNet sync_target(const FeedForwardNet& net) { return net; }

struct EpisodeSummary {
  long episode_id = 0;
  bool success = false;
  int steps = 0;
  double episode_return = 0.0;
};

/// Play one episode from the empty grid, storing every transition under a
/// fresh episode id. `after_step` runs after each stored transition (the
/// harness hangs training off it).
template <typename StepHook>
EpisodeSummary run_episode(const FeedForwardNet& net, Grid goal, const Lexicon& lexicon,
                           double epsilon, Rng& rng, ReplayBuffer& buffer, int budget,
                           StepHook&& after_step) {
  EpisodeSummary summary;
  summary.episode_id = buffer.begin_episode();
  Grid state;
  std::vector<int> messages;
  bool dead_end = false;
  for (int t = 0; t < budget;) {
    int message_id;
    try {
      message_id = select_message(net, goal, state, lexicon, epsilon, rng);
    } catch (const NoLegalMessage&) {
      dead_end = true;
      break;
    }
    StepResult sr = step(state, goal, message_id, lexicon, t, budget);
    buffer.push(Transition{goal, state, message_id, sr.reward, sr.next_state,
                           sr.terminal, t, summary.episode_id});
    messages.push_back(message_id);
    summary.episode_return += sr.reward;
    state = sr.next_state;
    ++t;
    summary.steps = t;
    after_step();
    if (sr.terminal) break;
  }
  summary.success = !dead_end && state == goal;
  buffer.record_episode(EpisodeMeta{summary.episode_id, goal, std::move(messages),
                                    summary.success});
  return summary;
}

inline EpisodeSummary run_episode(const FeedForwardNet& net, Grid goal,
                                  const Lexicon& lexicon, double epsilon, Rng& rng,
                                  ReplayBuffer& buffer, int budget = kMessageBudget) {
  return run_episode(net, goal, lexicon, epsilon, rng, buffer, budget, [] {});
}

}  // namespace archbuild
