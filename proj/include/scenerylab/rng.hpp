// Counter-based random number generation (Threefry4x64-20).
//
// Every random quantity in the project is a pure function of
// (seed, stream identifiers, counter), so replicas can be farmed out to any
// number of workers without changing a single output bit. Streams never
// share state and can be recreated cheaply anywhere.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace scenerylab::rng {

using Block = std::array<std::uint64_t, 4>;

namespace detail {

inline std::uint64_t rotl(std::uint64_t x, int r) {
  return (x << r) | (x >> (64 - r));
}

}  // namespace detail

// Threefry4x64, 20 rounds. Bijective mixing of a 256-bit counter under a
// 256-bit key; the standard recommended round count.
inline Block threefry4x64(const Block& counter, const Block& key) {
  static constexpr int kRot[8][2] = {{14, 16}, {52, 57}, {23, 40}, {5, 37},
                                     {25, 33}, {46, 12}, {58, 22}, {32, 32}};
  constexpr std::uint64_t kParity = 0x1BD11BDAA9FC1A22ull;

  std::uint64_t ks[5] = {key[0], key[1], key[2], key[3],
                         kParity ^ key[0] ^ key[1] ^ key[2] ^ key[3]};
  std::uint64_t x0 = counter[0] + ks[0];
  std::uint64_t x1 = counter[1] + ks[1];
  std::uint64_t x2 = counter[2] + ks[2];
  std::uint64_t x3 = counter[3] + ks[3];

  for (int r = 0; r < 20; ++r) {
    x0 += x1;
    x1 = detail::rotl(x1, kRot[r % 8][0]);
    x1 ^= x0;
    x2 += x3;
    x3 = detail::rotl(x3, kRot[r % 8][1]);
    x3 ^= x2;
    std::uint64_t t = x1;
    x1 = x3;
    x3 = t;
    if ((r + 1) % 4 == 0) {
      std::uint64_t s = static_cast<std::uint64_t>((r + 1) / 4);
      x0 += ks[s % 5];
      x1 += ks[(s + 1) % 5];
      x2 += ks[(s + 2) % 5];
      x3 += ks[(s + 3) % 5];
      x3 += s;
    }
  }
  return {x0, x1, x2, x3};
}

// Stream purposes. Keeping them disjoint guarantees that e.g. the walk of
// replica r and the scenery of replica r never reuse the same bits.
enum class Purpose : std::uint64_t {
  walk = 1,
  scenery = 2,
  tilt = 3,
  oracle = 4,
  selftest = 5,
};

// u64 -> double in [0, 1), 53 significant bits.
inline double to_unit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// u64 -> double in (0, 1]; safe as a log() argument.
inline double to_unit_open(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

// Sequential stream: key = (seed, purpose, a, b), counter runs 0,1,2,...
// Each counter value yields a block of four u64 values.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, Purpose purpose, std::uint64_t a = 0,
               std::uint64_t b = 0)
      : key_{seed, static_cast<std::uint64_t>(purpose), a, b} {}

  std::uint64_t next_u64() {
    if (idx_ == 4) {
      buf_ = threefry4x64({block_, 0, 0, 0}, key_);
      ++block_;
      idx_ = 0;
    }
    return buf_[idx_++];
  }

  double next_unit() { return to_unit(next_u64()); }
  double next_unit_open() { return to_unit_open(next_u64()); }

  // Box-Muller; draws are produced in pairs, one cached.
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = next_unit_open();
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  Block key_;
  Block buf_{};
  std::uint64_t block_ = 0;
  int idx_ = 4;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

// One block keyed by an arbitrary 192-bit payload (used for site-keyed
// scenery values: payload = packed lattice coordinates).
inline Block keyed_block(std::uint64_t seed, Purpose purpose,
                         std::uint64_t c0, std::uint64_t c1,
                         std::uint64_t c2, std::uint64_t lane = 0) {
  return threefry4x64({c0, c1, c2, lane},
                      {seed, static_cast<std::uint64_t>(purpose), 0, 0});
}

}  // namespace scenerylab::rng
