#pragma once

#include <cstdint>
#include <span>

namespace rankzo {

/// Counter-based generator: the n-th output is a pure function of
/// (seed, stream, n), so any position in a stream can be reproduced
/// without replaying it.
///
/// Output n is splitmix64(key + n * 0x9E3779B97F4A7C15) with
/// key = splitmix64(seed ^ splitmix64(stream)). The seed is a plain
/// documented 64-bit value; the counter is the only mutable state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();

  /// Standard normal via Box-Muller; consumes two outputs per pair.
  double normal();
  void fill_normal(std::span<double> out);

  /// Independent stream derived from this generator's seed and stream id.
  [[nodiscard]] CounterRng substream(std::uint64_t id) const;

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t stream() const { return stream_; }
  [[nodiscard]] std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t z);

}  // namespace rankzo
