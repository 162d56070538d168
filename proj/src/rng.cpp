#include "rwrs/rng.hpp"

#include <cmath>
#include <numbers>

namespace rwrs {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

std::array<std::uint32_t, 2> derive_key(const StreamId& id, Purpose purpose) noexcept {
  std::uint64_t k = splitmix64(id.seed ^ splitmix64(id.experiment + 0x632BE59BD9B4E019ull *
                                                                        static_cast<std::uint64_t>(purpose)));
  return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

std::array<std::uint32_t, 4> make_counter(std::uint64_t index, std::uint64_t replicate) noexcept {
  return {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
          static_cast<std::uint32_t>(replicate), static_cast<std::uint32_t>(replicate >> 32)};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c,
                                           std::array<std::uint32_t, 2> k) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }
  return c;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t experiment_id(std::string_view name) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

CounterRng::CounterRng(const StreamId& id, Purpose purpose) noexcept
    : key_(derive_key(id, purpose)), replicate_(id.replicate) {}

void CounterRng::refill() noexcept {
  const auto out = philox4x32_10(make_counter(block_++, replicate_), key_);
  // Popped from the back, so store the first word last.
  buffer_[1] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  buffer_[0] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  buffered_ = 2;
}

std::array<std::uint64_t, 2> CounterRng::block_at(std::uint64_t index) const noexcept {
  // High bit separates random-access words from the sequential blocks.
  const auto out = philox4x32_10(make_counter(index | (1ull << 63), replicate_), key_);
  return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
          (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

double normal_at(const CounterRng& rng, std::uint64_t index) noexcept {
  const auto [w, v] = rng.block_at(index);
  const double u1 = (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = static_cast<double>(v >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rwrs
