#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace archbuild {

/// Deterministic random source. All draws go through hand-rolled mappings so
/// that streams are reproducible independent of the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n). n must be positive.
  std::size_t next_index(std::size_t n) {
    if (n == 0) throw std::logic_error("Rng::next_index: empty range");
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  /// Uniform integer in [lo, hi] inclusive.
  long next_int(long lo, long hi) {
    return lo + static_cast<long>(next_index(static_cast<std::size_t>(hi - lo + 1)));
  }

  std::string serialize() const {
    std::ostringstream out;
    out << engine_;
    return out.str();
  }

  void deserialize(const std::string& state) {
    std::istringstream in(state);
    in >> engine_;
    if (in.fail()) throw std::runtime_error("Rng: bad serialized state");
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace archbuild
