// Local-time field of one walk path: sparse site -> visit count storage,
// frozen into canonical (packed-key-sorted) order, with cached power sums.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "scenerylab/lattice.hpp"

namespace scenerylab {

using u128 = unsigned __int128;

inline u128 checked_mul(u128 a, u128 b) {
  if (a != 0 && b > static_cast<u128>(-1) / a)
    throw std::overflow_error("128-bit multiply overflow in power sum");
  return a * b;
}

inline u128 checked_add(u128 a, u128 b) {
  if (b > static_cast<u128>(-1) - a)
    throw std::overflow_error("128-bit add overflow in power sum");
  return a + b;
}

class LocalTimeField {
 public:
  // entries need not be sorted; n = total steps (sum of counts).
  LocalTimeField(int d, std::int64_t n,
                 std::vector<std::pair<SiteKey, std::uint32_t>> entries,
                 bool already_sorted = false);

  int dim() const { return d_; }
  std::int64_t steps() const { return n_; }
  const std::vector<std::pair<SiteKey, std::uint32_t>>& entries() const {
    return entries_;
  }
  std::size_t occupied_sites() const { return entries_.size(); }

  u128 ell2() const { return ell2_; }
  u128 ell3() const { return ell3_; }
  std::uint32_t ell_inf() const { return ell_inf_; }

  double ell2_d() const { return static_cast<double>(ell2_); }
  double ell3_d() const { return static_cast<double>(ell3_); }

 private:
  int d_;
  std::int64_t n_;
  std::vector<std::pair<SiteKey, std::uint32_t>> entries_;
  u128 ell2_ = 0;
  u128 ell3_ = 0;
  std::uint32_t ell_inf_ = 0;
};

// Sum of counts(z)^q; q = 1 returns n. Overflow raises, never wraps.
u128 q_fold(const LocalTimeField& field, int q);

}  // namespace scenerylab
