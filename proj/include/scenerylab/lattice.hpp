// Lattice sites, packed site keys, sparse occupancy map and step laws.
//
// Site keys pack d signed 32-bit coordinates little-endian into a fixed
// 160-bit word array. Everything downstream (sorting, hashing, site-keyed
// random values, the enumeration oracle) uses this one packing so that all
// routes agree bit-exactly. Canonical site order is the numeric order of
// the packed little-endian integer, i.e. lexicographic from the highest
// coordinate word down.

#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace scenerylab {

inline constexpr int kMaxDim = 5;

using SiteKey = std::array<std::uint32_t, kMaxDim>;

struct Site {
  std::array<std::int32_t, kMaxDim> c{};  // coordinates beyond d stay 0

  std::int32_t& operator[](int i) { return c[i]; }
  std::int32_t operator[](int i) const { return c[i]; }
  bool operator==(const Site& o) const { return c == o.c; }
};

inline SiteKey pack_site(const Site& s) {
  SiteKey k;
  for (int i = 0; i < kMaxDim; ++i)
    k[i] = static_cast<std::uint32_t>(s.c[i]);
  return k;
}

inline Site unpack_site(const SiteKey& k) {
  Site s;
  for (int i = 0; i < kMaxDim; ++i)
    s.c[i] = static_cast<std::int32_t>(k[i]);
  return s;
}

// Numeric order of the packed little-endian integer.
inline bool key_less(const SiteKey& a, const SiteKey& b) {
  for (int i = kMaxDim - 1; i >= 0; --i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

inline std::uint64_t key_hash(const SiteKey& k) {
  std::uint64_t h = 0x9E3779B97F4A7C15ull;
  for (int i = 0; i < kMaxDim; ++i) {
    h ^= k[i] + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h *= 0xBF58476D1CE4E5B9ull;
    h ^= h >> 27;
  }
  return h;
}

// Open-addressing site -> count map tuned for the accumulation hot loop.
// Insert-or-increment only; count == 0 marks an empty slot.
class SiteCountMap {
 public:
  explicit SiteCountMap(std::size_t expected = 64) { reset(expected); }

  void reset(std::size_t expected) {
    std::size_t cap = 16;
    while (cap * 5 < expected * 8) cap <<= 1;
    if (keys_.size() != cap) {
      keys_.assign(cap, SiteKey{});
      counts_.assign(cap, 0);
    } else {
      std::fill(counts_.begin(), counts_.end(), 0u);
    }
    mask_ = cap - 1;
    size_ = 0;
  }

  // Returns the count *before* this increment (0 on first visit).
  std::uint32_t increment(const SiteKey& k) {
    if ((size_ + 1) * 8 > keys_.size() * 5) grow();
    std::size_t i = key_hash(k) & mask_;
    for (;;) {
      if (counts_[i] == 0) {
        keys_[i] = k;
        counts_[i] = 1;
        ++size_;
        return 0;
      }
      if (keys_[i] == k) return counts_[i]++;
      i = (i + 1) & mask_;
    }
  }

  std::uint32_t count(const SiteKey& k) const {
    std::size_t i = key_hash(k) & mask_;
    for (;;) {
      if (counts_[i] == 0) return 0;
      if (keys_[i] == k) return counts_[i];
      i = (i + 1) & mask_;
    }
  }

  std::size_t size() const { return size_; }

  std::vector<std::pair<SiteKey, std::uint32_t>> extract_sorted() const;

 private:
  void grow();

  std::vector<SiteKey> keys_;
  std::vector<std::uint32_t> counts_;
  std::size_t mask_ = 0;
  std::size_t size_ = 0;
};

// Probability of one support point; num/den kept when the law was built
// from rationals (the enumeration oracle requires them).
struct StepProb {
  Site step;
  double p;
  std::int64_t num = 0;
  std::int64_t den = 0;  // 0 = no rational representation

  bool has_rational() const { return den > 0; }
};

// Finite-support symmetric step law on Z^d, d in [2, kMaxDim].
//
// Invariants enforced at construction: probabilities sum to 1 (1e-12),
// p(x) = p(-x) for every support point, covariance nondegenerate.
class StepLaw {
 public:
  StepLaw(int d, std::vector<StepProb> support, std::string name,
          bool require_aperiodic = false);

  static StepLaw simple(int d);  // nearest neighbour, p = 1/(2d); period 2
  static StepLaw lazy(int d);    // p(0) = 1/2, p(+-e_j) = 1/(4d); aperiodic
  static StepLaw by_name(const std::string& name, int d);

  int dim() const { return d_; }
  const std::vector<StepProb>& support() const { return support_; }
  const std::string& name() const { return name_; }
  bool aperiodic() const { return aperiodic_; }
  bool rational() const { return rational_; }
  std::uint64_t hash() const { return hash_; }
  int support_radius() const { return radius_; }

  double covariance(int a, int b) const { return cov_[a][b]; }
  double det_covariance() const { return det_cov_; }

  // Axis structure (support within {0, +-e_j}): enables the exact O(K^2)
  // return-probability recursion. All shipped laws qualify.
  bool is_axis_law() const { return axis_; }
  double hold_prob() const { return hold_prob_; }
  const std::vector<double>& axis_probs() const { return axis_probs_; }

  // Cumulative 2^64-scaled thresholds for drawing one step from one u64.
  const std::vector<std::uint64_t>& thresholds() const { return thresholds_; }

  Site draw_step(std::uint64_t u) const {
    std::size_t i = 0;
    while (i + 1 < thresholds_.size() && u >= thresholds_[i]) ++i;
    return support_[i].step;
  }

 private:
  int d_;
  std::vector<StepProb> support_;
  std::string name_;
  bool aperiodic_ = false;
  bool rational_ = false;
  bool axis_ = false;
  int radius_ = 0;
  double hold_prob_ = 0.0;
  std::vector<double> axis_probs_;
  double cov_[kMaxDim][kMaxDim] = {};
  double det_cov_ = 0.0;
  std::uint64_t hash_ = 0;
  std::vector<std::uint64_t> thresholds_;
};

}  // namespace scenerylab
