#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace bayesrl {

/// Philox4x32-10 block function (Salmon et al., Random123). Exposed for
/// known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Purpose tags used to carve independent substreams out of one run.
enum class StreamPurpose : std::uint64_t {
  environment = 1,
  explore = 2,
  action = 3,
  posterior = 4,
  metric = 5,
  planner = 6,
  init = 7,
};

/// Mixes a run index and a purpose tag into a 64-bit stream id.
std::uint64_t derive_stream_id(std::uint64_t run_index, StreamPurpose purpose);

/// Counter-based random stream keyed by (seed, stream_id).
///
/// The seed is the Philox key; the stream id occupies the upper half of the
/// 128-bit counter and the draw index the lower half, so two streams with
/// distinct ids never overlap and each stream can be created without any
/// shared state. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();
  /// Unbiased integer in [0, n). Requires n >= 1.
  std::size_t uniform_index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }

  /// Independent child stream; deterministic in (seed, stream_id, tag).
  RngStream substream(std::uint64_t tag) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t draws() const noexcept { return counter_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace bayesrl
