#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace biso {

// Counter-based splittable random stream. Every output is a bijective hash
// of (key, counter), so a stream can hand out independent child streams by
// key derivation; replicates seeded from distinct children are reproducible
// regardless of scheduling order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_(finalize(seed + kKeySalt)) {}

  // Independent substream identified by `index` relative to this stream.
  RngStream child(std::uint64_t index) const {
    RngStream c(0);
    c.key_ = finalize(key_ ^ finalize(index * kGamma + kChildSalt));
    c.counter_ = 0;
    return c;
  }

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64() {
    counter_ += kGamma;
    return finalize(key_ + counter_);
  }

  // Uniform on [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer on [0, bound).
  std::int64_t next_below(std::int64_t bound) {
    if (bound <= 0) throw std::invalid_argument("next_below: bound must be positive");
    const std::uint64_t b = static_cast<std::uint64_t>(bound);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % b;
    std::uint64_t u;
    do {
      u = next_u64();
    } while (u >= limit);
    return static_cast<std::int64_t>(u % b);
  }

  bool next_bool() { return (next_u64() & 1u) != 0; }

  // Standard normal via Marsaglia polar, second value cached.
  double next_gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_unit() - 1.0;
      v = 2.0 * next_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * f;
    has_cached_ = true;
    return u * f;
  }

  // Poisson draw; exact for all means (sequential search below 30,
  // Hormann's PTRS transformed rejection above).
  std::int64_t poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("poisson: mean must be nonnegative");
    if (mean == 0.0) return 0;
    if (mean < 30.0) return poisson_small(mean);
    return poisson_ptrs(mean);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kKeySalt = 0x5bf0364a33ac9a71ULL;
  static constexpr std::uint64_t kChildSalt = 0x94d049bb133111ebULL;

  static std::uint64_t finalize(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::int64_t poisson_small(double mean) {
    const double limit = std::exp(-mean);
    std::int64_t k = 0;
    double p = next_unit();
    while (p > limit) {
      ++k;
      p *= next_unit();
    }
    return k;
  }

  std::int64_t poisson_ptrs(double mean) {
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
      const double u = next_unit() - 0.5;
      const double v = next_unit();
      const double us = 0.5 - std::fabs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
      const double rhs = kf * log_mean - mean - std::lgamma(kf + 1.0);
      if (lhs <= rhs) return static_cast<std::int64_t>(kf);
    }
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace biso
