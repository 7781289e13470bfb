#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "biso/rng.hpp"

namespace biso {

// Bijection on {0, ..., n-1}; mapping()[i] is the rank of item i.
class Permutation {
 public:
  Permutation() = default;

  static Permutation identity(int n) {
    Permutation p;
    p.map_.resize(n);
    std::iota(p.map_.begin(), p.map_.end(), 0);
    return p;
  }

  static Permutation random(int n, RngStream& rng) {
    Permutation p = identity(n);
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.next_below(i + 1));
      std::swap(p.map_[i], p.map_[j]);
    }
    return p;
  }

  static Permutation from_mapping(std::vector<std::int32_t> mapping) {
    Permutation p;
    p.map_ = std::move(mapping);
    if (!p.is_valid()) throw std::invalid_argument("Permutation: mapping is not a bijection");
    return p;
  }

  int size() const { return static_cast<int>(map_.size()); }
  std::int32_t operator()(int i) const { return map_[i]; }
  const std::vector<std::int32_t>& mapping() const { return map_; }

  bool is_valid() const {
    std::vector<bool> seen(map_.size(), false);
    for (std::int32_t v : map_) {
      if (v < 0 || v >= static_cast<std::int32_t>(map_.size()) || seen[v]) return false;
      seen[v] = true;
    }
    return true;
  }

  Permutation inverse() const {
    Permutation inv;
    inv.map_.resize(map_.size());
    for (int i = 0; i < size(); ++i) inv.map_[map_[i]] = i;
    return inv;
  }

  // i -> n-1-rank(i); pairs with the row permutation in skew-symmetric models.
  Permutation reversed() const {
    Permutation r;
    r.map_.resize(map_.size());
    const int n = size();
    for (int i = 0; i < n; ++i) r.map_[i] = n - 1 - map_[i];
    return r;
  }

  bool operator==(const Permutation& o) const { return map_ == o.map_; }

 private:
  std::vector<std::int32_t> map_;
};

}  // namespace biso
