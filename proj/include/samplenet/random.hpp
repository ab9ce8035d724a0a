#pragma once

#include <cstdint>
#include <limits>

namespace samplenet {

enum class DrawKind : std::uint32_t {
  Theta = 1,
  Signal = 2,
  MessageNoise = 3,
  Message = 4,
};

/// Coordinates of one random draw. Every draw in a run has its own key, so
/// results never depend on the order in which replicas or agents execute.
struct StreamKey {
  std::uint64_t master_seed = 0;
  std::uint64_t replica = 0;
  std::uint32_t agent = 0;
  std::uint32_t round = 0;
  DrawKind kind = DrawKind::Theta;
};

std::uint64_t derive_seed(const StreamKey& key);

/// splitmix64 stream. Small enough to construct per draw.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  explicit SplitMix64(const StreamKey& key) : state_(derive_seed(key)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform();
  /// Standard normal via Box-Muller; consumes two uniforms.
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
};

/// Convenience: one standard normal draw for `key`.
double normal_draw(const StreamKey& key);

}  // namespace samplenet
