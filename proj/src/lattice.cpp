#include "scenerylab/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace scenerylab {

std::vector<std::pair<SiteKey, std::uint32_t>> SiteCountMap::extract_sorted()
    const {
  std::vector<std::pair<SiteKey, std::uint32_t>> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (counts_[i] != 0) out.emplace_back(keys_[i], counts_[i]);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return key_less(a.first, b.first); });
  return out;
}

void SiteCountMap::grow() {
  std::vector<SiteKey> old_keys = std::move(keys_);
  std::vector<std::uint32_t> old_counts = std::move(counts_);
  std::size_t cap = old_keys.size() * 2;
  keys_.assign(cap, SiteKey{});
  counts_.assign(cap, 0);
  mask_ = cap - 1;
  for (std::size_t i = 0; i < old_keys.size(); ++i) {
    if (old_counts[i] == 0) continue;
    std::size_t j = key_hash(old_keys[i]) & mask_;
    while (counts_[j] != 0) j = (j + 1) & mask_;
    keys_[j] = old_keys[i];
    counts_[j] = old_counts[i];
  }
}

namespace {

// det of a d x d matrix by Gaussian elimination with partial pivoting.
double det_small(const double m[kMaxDim][kMaxDim], int d) {
  double a[kMaxDim][kMaxDim];
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a[i][j] = m[i][j];
  double det = 1.0;
  for (int c = 0; c < d; ++c) {
    int piv = c;
    for (int r = c + 1; r < d; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < d; ++j) std::swap(a[piv][j], a[c][j]);
      det = -det;
    }
    det *= a[c][c];
    for (int r = c + 1; r < d; ++r) {
      double f = a[r][c] / a[c][c];
      for (int j = c; j < d; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return det;
}

std::uint64_t fnv64(const void* data, std::size_t len, std::uint64_t h) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

StepLaw::StepLaw(int d, std::vector<StepProb> support, std::string name,
                 bool require_aperiodic)
    : d_(d), support_(std::move(support)), name_(std::move(name)) {
  if (d < 2 || d > kMaxDim)
    throw std::invalid_argument("StepLaw: dimension must be in [2, " +
                                std::to_string(kMaxDim) + "], got " +
                                std::to_string(d));
  if (support_.empty()) throw std::invalid_argument("StepLaw: empty support");

  double total = 0.0;
  rational_ = true;
  for (auto& sp : support_) {
    for (int i = d; i < kMaxDim; ++i) {
      if (sp.step.c[i] != 0)
        throw std::invalid_argument("StepLaw: coordinate outside dimension");
    }
    if (sp.has_rational()) sp.p = double(sp.num) / double(sp.den);
    else rational_ = false;
    if (sp.p < 0.0) throw std::invalid_argument("StepLaw: negative probability");
    total += sp.p;
    for (int i = 0; i < d; ++i)
      radius_ = std::max(radius_, std::abs(sp.step.c[i]));
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("StepLaw: probabilities sum to " +
                                std::to_string(total));

  // symmetry: the mirrored point must exist with the same probability
  for (const auto& sp : support_) {
    Site neg;
    for (int i = 0; i < d; ++i) neg.c[i] = -sp.step.c[i];
    bool found = false;
    for (const auto& other : support_) {
      if (other.step == neg && std::fabs(other.p - sp.p) <= 1e-15) {
        found = true;
        break;
      }
    }
    if (!found)
      throw std::invalid_argument("StepLaw: support is not symmetric");
  }

  // covariance from the law; symmetry makes the mean zero
  for (const auto& sp : support_)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        cov_[a][b] += sp.p * sp.step.c[a] * sp.step.c[b];
  det_cov_ = det_small(cov_, d);
  if (!(det_cov_ > 0.0))
    throw std::invalid_argument("StepLaw: degenerate covariance");

  // Period of a symmetric walk is 1 or 2: two steps x then -x close a loop.
  // Periodic (period 2) iff some parity vector v in {0,1}^d has v.x odd for
  // every support point with positive probability.
  aperiodic_ = true;
  for (std::uint32_t v = 1; v < (1u << d); ++v) {
    bool all_odd = true;
    for (const auto& sp : support_) {
      if (sp.p == 0.0) continue;
      int dot = 0;
      for (int i = 0; i < d; ++i)
        if (v & (1u << i)) dot += sp.step.c[i];
      if ((dot & 1) == 0) {
        all_odd = false;
        break;
      }
    }
    if (all_odd) {
      aperiodic_ = false;
      break;
    }
  }
  if (require_aperiodic && !aperiodic_)
    throw std::invalid_argument("StepLaw: aperiodic law required, got periodic");

  // axis structure
  axis_ = true;
  axis_probs_.assign(d, 0.0);
  for (const auto& sp : support_) {
    int nz = 0, axis = -1;
    for (int i = 0; i < d; ++i) {
      if (sp.step.c[i] != 0) {
        ++nz;
        axis = i;
      }
    }
    if (nz == 0) {
      hold_prob_ += sp.p;
    } else if (nz == 1 && std::abs(sp.step.c[axis]) == 1) {
      if (sp.step.c[axis] > 0) axis_probs_[axis] = sp.p;
    } else {
      axis_ = false;
    }
  }
  if (!axis_) {
    hold_prob_ = 0.0;
    axis_probs_.clear();
  }

  // deterministic serialization hash (law identity for cache files)
  std::uint64_t h = 0xCBF29CE484222325ull;
  h = fnv64(&d_, sizeof(d_), h);
  for (const auto& sp : support_) {
    h = fnv64(sp.step.c.data(), sizeof(sp.step.c), h);
    if (sp.has_rational()) {
      h = fnv64(&sp.num, sizeof(sp.num), h);
      h = fnv64(&sp.den, sizeof(sp.den), h);
    } else {
      h = fnv64(&sp.p, sizeof(sp.p), h);
    }
  }
  hash_ = h;

  // cumulative sampling thresholds on the 2^64 scale
  thresholds_.resize(support_.size());
  long double acc = 0.0L;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    acc += support_[i].p;
    long double scaled = acc * 18446744073709551616.0L;  // 2^64
    thresholds_[i] = scaled >= 18446744073709551615.0L
                         ? ~0ull
                         : static_cast<std::uint64_t>(scaled);
  }
  thresholds_.back() = ~0ull;
}

StepLaw StepLaw::simple(int d) {
  std::vector<StepProb> sup;
  for (int i = 0; i < d; ++i) {
    for (int sgn : {+1, -1}) {
      StepProb sp;
      sp.step.c[i] = sgn;
      sp.num = 1;
      sp.den = 2 * d;
      sup.push_back(sp);
    }
  }
  return StepLaw(d, std::move(sup), "simple" + std::to_string(d));
}

StepLaw StepLaw::lazy(int d) {
  std::vector<StepProb> sup;
  StepProb hold;
  hold.num = 1;
  hold.den = 2;
  sup.push_back(hold);
  for (int i = 0; i < d; ++i) {
    for (int sgn : {+1, -1}) {
      StepProb sp;
      sp.step.c[i] = sgn;
      sp.num = 1;
      sp.den = 4 * d;
      sup.push_back(sp);
    }
  }
  return StepLaw(d, std::move(sup), "lazy" + std::to_string(d), true);
}

StepLaw StepLaw::by_name(const std::string& name, int d) {
  if (name == "simple") return simple(d);
  if (name == "lazy") return lazy(d);
  throw std::invalid_argument("unknown walk law: " + name);
}

}  // namespace scenerylab
