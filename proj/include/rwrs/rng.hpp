#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace rwrs {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11). Pure function of
/// (counter, key); every random quantity in the toolkit is derived from it.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Stable 64-bit id for experiment names (FNV-1a).
std::uint64_t experiment_id(std::string_view name) noexcept;

/// Which independent substream of a replicate is being drawn.
enum class Purpose : std::uint64_t { Steps = 1, Scenery = 2, Aux = 3 };

/// Identifies one replicate of one experiment. Replicate r gets the same
/// numbers regardless of which worker runs it.
struct StreamId {
  std::uint64_t seed = 0;
  std::uint64_t experiment = 0;
  std::uint64_t replicate = 0;

  StreamId with_replicate(std::uint64_t r) const noexcept { return {seed, experiment, r}; }
};

/// Sequential view over the counter space of one (stream, purpose). Satisfies
/// UniformRandomBitGenerator so std:: distributions can consume it.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(const StreamId& id, Purpose purpose) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (buffered_ == 0) refill();
    return buffer_[--buffered_];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Random-access draw: word `index` of this stream, independent of the
  /// sequential position.
  std::uint64_t at(std::uint64_t index) const noexcept { return block_at(index)[0]; }

  /// Both 64-bit words of the random-access block at `index`.
  std::array<std::uint64_t, 2> block_at(std::uint64_t index) const noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_{};
  std::uint64_t replicate_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

/// Standard normal at random-access index (Box-Muller on one Philox block).
double normal_at(const CounterRng& rng, std::uint64_t index) noexcept;

}  // namespace rwrs
