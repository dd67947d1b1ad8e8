#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "archbuild/errors.hpp"
#include "archbuild/grid.hpp"

namespace archbuild {

inline constexpr int kPrimitiveCount = 12;
inline constexpr int kDefaultMMax = 20;

/// Fixed id layout: V1..V6 = 0..5, H1..H6 = 6..11.
inline BlockAction primitive_action(int id) {
  if (id < 0 || id >= kPrimitiveCount) {
    throw InactiveMessage("not a primitive id: " + std::to_string(id));
  }
  if (id < kGridSize) return BlockAction{Orientation::vertical, id};
  return BlockAction{Orientation::horizontal, id - kGridSize};
}

inline int primitive_id(BlockAction action) {
  return action.orientation == Orientation::vertical ? action.column
                                                     : kGridSize + action.column;
}

inline std::string message_name(int id) {
  if (id < 0) return "?";
  if (id < kGridSize) return "V" + std::to_string(id + 1);
  if (id < kPrimitiveCount) return "H" + std::to_string(id - kGridSize + 1);
  return "A" + std::to_string(id);
}

/// Inverse of message_name ("V3" -> 2, "H1" -> 6, "A12" -> 12).
inline std::optional<int> parse_message_name(std::string_view name) {
  if (name.size() < 2) return std::nullopt;
  char kind = name[0];
  int num = 0;
  for (char c : name.substr(1)) {
    if (c < '0' || c > '9') return std::nullopt;
    num = num * 10 + (c - '0');
  }
  switch (kind) {
    case 'V':
      return (num >= 1 && num <= kGridSize) ? std::optional<int>(num - 1) : std::nullopt;
    case 'H':
      return (num >= 1 && num <= kGridSize) ? std::optional<int>(kGridSize + num - 1)
                                            : std::nullopt;
    case 'A':
      return num >= kPrimitiveCount ? std::optional<int>(num) : std::nullopt;
    default:
      return std::nullopt;
  }
}

struct Message {
  int id = 0;
  BlockAction action{};       // meaningful iff primitive
  std::vector<int> children;  // non-empty iff abstraction; all ids < id
  bool is_primitive() const { return children.empty(); }
};

/// Ordered, append-only message alphabet. Slots 0..11 are always the
/// primitives; invented abstractions take the next free id up to m_max.
class Lexicon {
 public:
  explicit Lexicon(int m_max = kDefaultMMax) : m_max_(m_max) {
    if (m_max_ < kPrimitiveCount) {
      throw ConfigError("m_max must be at least " + std::to_string(kPrimitiveCount));
    }
    messages_.reserve(static_cast<std::size_t>(m_max_));
    expansions_.reserve(static_cast<std::size_t>(m_max_));
    for (int id = 0; id < kPrimitiveCount; ++id) {
      messages_.push_back(Message{id, primitive_action(id), {}});
      expansions_.push_back({primitive_action(id)});
    }
  }

  int m_max() const { return m_max_; }
  int active_count() const { return static_cast<int>(messages_.size()); }
  bool active(int id) const { return id >= 0 && id < active_count(); }
  bool full() const { return active_count() >= m_max_; }

  const Message& message(int id) const {
    require_active(id);
    return messages_[static_cast<std::size_t>(id)];
  }

  const std::vector<Message>& messages() const { return messages_; }

  /// Append a new abstraction; returns its id. Children must reference
  /// already-active messages, which keeps every expansion finite.
  int add_abstraction(std::vector<int> children) {
    if (full()) throw ConfigError("lexicon is full (m_max=" + std::to_string(m_max_) + ")");
    if (children.empty()) throw ConfigError("abstraction needs at least one child");
    int id = active_count();
    std::vector<BlockAction> expansion;
    for (int child : children) {
      if (child < 0 || child >= id) {
        throw ConfigError("abstraction child " + std::to_string(child) +
                          " must reference an earlier active message");
      }
      const auto& sub = expansions_[static_cast<std::size_t>(child)];
      expansion.insert(expansion.end(), sub.begin(), sub.end());
    }
    messages_.push_back(Message{id, {}, std::move(children)});
    expansions_.push_back(std::move(expansion));
    return id;
  }

  std::optional<int> find_abstraction(std::span<const int> sequence) const {
    for (int id = kPrimitiveCount; id < active_count(); ++id) {
      const auto& children = messages_[static_cast<std::size_t>(id)].children;
      if (children.size() == sequence.size() &&
          std::equal(children.begin(), children.end(), sequence.begin())) {
        return id;
      }
    }
    return std::nullopt;
  }

  /// Depth-first, in-order primitive expansion.
  std::vector<BlockAction> expand(int id) const { return expansion(id); }

  /// Cached expansion; hot paths use this to avoid re-walking the tree.
  const std::vector<BlockAction>& expansion(int id) const {
    require_active(id);
    return expansions_[static_cast<std::size_t>(id)];
  }

  std::string name(int id) const { return message_name(id); }

  /// "A12=[V1,V2,H1]" for abstractions, plain name for primitives.
  std::string describe(int id) const {
    const Message& m = message(id);
    if (m.is_primitive()) return name(id);
    std::string out = name(id) + "=[";
    for (std::size_t i = 0; i < m.children.size(); ++i) {
      if (i > 0) out += ',';
      out += name(m.children[i]);
    }
    out += ']';
    return out;
  }

 private:
  void require_active(int id) const {
    if (!active(id)) {
      throw InactiveMessage("message id " + std::to_string(id) + " is not active");
    }
  }

  int m_max_;
  std::vector<Message> messages_;
  std::vector<std::vector<BlockAction>> expansions_;
};

}  // namespace archbuild
