#pragma once

#include <cstdint>

namespace tarlm {

/// Key for one random stream. (seed, stream_id) fully determines every draw;
/// distinct stream_ids give statistically independent streams, which is what
/// makes parallel replicates reproducible regardless of scheduling.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// Derive a child stream key. Used to hand each bootstrap replicate /
/// Monte Carlo cell / limit-process draw its own stream without any shared
/// generator state. The mapping is a fixed 64-bit hash of
/// (parent stream_id, child index); collisions are negligible at the stream
/// counts this library produces.
RngSeed derive_stream(RngSeed base, std::uint64_t child);

/// xoshiro256++ with SplitMix64 state initialisation from (seed, stream_id).
///
/// The generator is fully portable: all draws are produced from explicit
/// 64-bit integer arithmetic, with uniform doubles taken as the top 53 bits
/// and normals from Box-Muller. No standard-library distribution objects are
/// involved, so a given RngSeed yields the same sequence on every platform.
class Rng {
 public:
  explicit Rng(RngSeed key);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform();

  /// Standard normal via Box-Muller; generates pairs, caches the second.
  double normal();

  /// Uniform integer in [0, n), unbiased (rejection on the top band). n >= 1.
  std::uint64_t uniform_below(std::uint64_t n);

 private:
  std::uint64_t state_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace tarlm
