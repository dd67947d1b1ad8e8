#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "archbuild/grid.hpp"

namespace archbuild {

struct Transition {
  Grid goal;
  Grid state;
  int message_id = 0;
  double reward = 0.0;
  Grid next_state;
  bool terminal = false;
  int t = 0;  // 0-based message index within the episode
  long episode_id = 0;
};

struct EpisodeMeta {
  long id = 0;
  Grid goal;
  std::vector<int> messages;
  bool success = false;
};

/// Ring buffer of transitions plus a bounded history of whole episodes (the
/// message sequences the miner and the dream phase work from).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity, std::size_t episode_history = 4096)
      : capacity_(capacity), episode_history_(episode_history) {}

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return data_.size(); }

  /// Physical slot access; uniform sampling over [0, size) is uniform over
  /// the stored transitions regardless of ring position.
  const Transition& operator[](std::size_t i) const { return data_[i]; }

  void push(const Transition& t) {
    if (data_.size() < capacity_) {
      data_.push_back(t);
      write_pos_ = data_.size() % capacity_;
    } else {
      data_[write_pos_] = t;
      write_pos_ = (write_pos_ + 1) % capacity_;
    }
  }

  long begin_episode() { return episode_counter_++; }

  void record_episode(EpisodeMeta meta) {
    episodes_.push_back(std::move(meta));
    while (episodes_.size() > episode_history_) episodes_.pop_front();
  }

  const std::deque<EpisodeMeta>& episodes() const { return episodes_; }
  long episode_counter() const { return episode_counter_; }

  // State restore hooks for run checkpointing.
  std::size_t write_pos() const { return write_pos_; }
  const std::vector<Transition>& raw() const { return data_; }
  void restore(std::vector<Transition> data, std::size_t write_pos,
               std::deque<EpisodeMeta> episodes, long episode_counter) {
    data_ = std::move(data);
    write_pos_ = write_pos;
    episodes_ = std::move(episodes);
    episode_counter_ = episode_counter;
  }

 private:
  std::size_t capacity_;
  std::size_t episode_history_;
  std::vector<Transition> data_;
  std::size_t write_pos_ = 0;
  std::deque<EpisodeMeta> episodes_;
  long episode_counter_ = 0;
};

}  // namespace archbuild
