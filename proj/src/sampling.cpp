#include "biso/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace biso {

int ceil_log2(std::int64_t x) {
  if (x < 1) throw std::invalid_argument("ceil_log2: x must be >= 1");
  int k = 0;
  std::int64_t v = 1;
  while (v < x) {
    v <<= 1;
    ++k;
  }
  return k;
}

int default_k_star(int n, int d) {
  return 3 * std::max(1, ceil_log2(std::max(n, d)));
}

bool exceeds_sparse_regime(int n, int d, double lambda0) {
  return lambda0 > std::log(static_cast<double>(n) * d);
}

ObservationSet ObservationSet::transposed() const {
  ObservationSet t;
  t.n = d;
  t.d = n;
  t.lambda0 = lambda0;
  t.rows = cols;
  t.cols = rows;
  t.values = values;
  return t;
}

ObservationSet draw_observations(const BisoInstance& inst, const SamplingConfig& config) {
  RngStream rng(config.seed);
  return draw_observations(inst, config, rng);
}

ObservationSet draw_observations(const BisoInstance& inst, const SamplingConfig& config,
                                 RngStream& rng) {
  if (config.lambda0 <= 0.0) throw std::invalid_argument("draw_observations: lambda0 must be > 0");
  const int n = inst.n(), d = inst.d();
  ObservationSet obs;
  obs.n = n;
  obs.d = d;
  obs.lambda0 = config.lambda0;
  const std::int64_t total = rng.poisson(config.lambda0 * n * d);
  obs.rows.reserve(total);
  obs.cols.reserve(total);
  obs.values.reserve(total);
  for (std::int64_t t = 0; t < total; ++t) {
    const int i = static_cast<int>(rng.next_below(n));
    const int j = static_cast<int>(rng.next_below(d));
    const double m = inst.m(i, j);
    double y;
    if (config.noise == NoiseKind::kBernoulli) {
      y = rng.next_unit() < m ? 1.0 : 0.0;
    } else {
      y = m + config.sigma * rng.next_gaussian();
    }
    obs.rows.push_back(i);
    obs.cols.push_back(j);
    obs.values.push_back(y);
  }
  return obs;
}

std::pair<ObservationSet, ObservationSet> split_half(const ObservationSet& obs, RngStream& rng) {
  ObservationSet a, b;
  a.n = b.n = obs.n;
  a.d = b.d = obs.d;
  a.lambda0 = b.lambda0 = obs.lambda0 / 2.0;
  for (std::int64_t t = 0; t < obs.count(); ++t) {
    ObservationSet& dst = rng.next_bool() ? a : b;
    dst.rows.push_back(obs.rows[t]);
    dst.cols.push_back(obs.cols[t]);
    dst.values.push_back(obs.values[t]);
  }
  return {std::move(a), std::move(b)};
}

SubsampleStack::SubsampleStack(int n, int d, int k_star, double lambda0)
    : n_(n), d_(d), k_star_(k_star), lambda0_(lambda0) {
  if (k_star < 1) throw std::invalid_argument("SubsampleStack: k_star must be >= 1");
  lambda0_minus_ = lambda0 / k_star;
  lambda1_ = 1.0 - std::exp(-lambda0_minus_);
  means_.assign(k_star, Matrix(n, d));
  counts_.assign(k_star, std::vector<std::int32_t>(static_cast<std::size_t>(n) * d, 0));
}

SubsampleStack SubsampleStack::transposed() const {
  SubsampleStack t(d_, n_, k_star_, lambda0_);
  for (int k = 0; k < k_star_; ++k) {
    t.means_[k] = means_[k].transposed();
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < d_; ++j)
        t.counts_[k][static_cast<std::size_t>(j) * n_ + i] =
            counts_[k][static_cast<std::size_t>(i) * d_ + j];
  }
  return t;
}

SubsampleStack SubsampleStack::from_matrix(const Matrix& y, int k_star, double lambda0) {
  SubsampleStack stack(y.rows, y.cols, k_star, lambda0);
  for (int k = 0; k < k_star; ++k) {
    stack.means_[k] = y;
    std::fill(stack.counts_[k].begin(), stack.counts_[k].end(), 1);
  }
  return stack;
}

SubsampleStack subsample(const ObservationSet& obs, int n, int d, double lambda0, int k_star,
                         RngStream& rng) {
  if (k_star < 1) throw std::invalid_argument("subsample: k_star must be >= 1");
  SubsampleStack stack(n, d, k_star, lambda0);
  for (std::int64_t t = 0; t < obs.count(); ++t) {
    const int k = static_cast<int>(rng.next_below(k_star));
    const std::size_t idx =
        static_cast<std::size_t>(obs.rows[t]) * d + static_cast<std::size_t>(obs.cols[t]);
    stack.counts_[k][idx] += 1;
    stack.means_[k].data[idx] += obs.values[t];
  }
  // Sums to means; unobserved entries stay 0.
  for (int k = 0; k < k_star; ++k) {
    for (std::size_t idx = 0; idx < stack.counts_[k].size(); ++idx) {
      const std::int32_t c = stack.counts_[k][idx];
      if (c > 0) stack.means_[k].data[idx] /= c;
    }
  }
  return stack;
}

}  // namespace biso
