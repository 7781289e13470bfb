#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "biso/matrix.hpp"
#include "biso/model.hpp"
#include "biso/rng.hpp"

namespace biso {

enum class NoiseKind { kGaussian, kBernoulli };

struct SamplingConfig {
  double lambda0 = 1.0;           // expected observations per entry
  NoiseKind noise = NoiseKind::kGaussian;
  double sigma = 1.0;             // Gaussian sd; Bernoulli behaves as sigma^2 = 1/4
  std::uint64_t seed = 1;

  double effective_sigma() const { return noise == NoiseKind::kBernoulli ? 0.5 : sigma; }
};

// Poissonized partial sample: count ~ Poisson(lambda0*n*d) observations at
// uniform positions, stored as parallel arrays.
struct ObservationSet {
  int n = 0;
  int d = 0;
  double lambda0 = 0.0;
  std::vector<std::int32_t> rows;   // i_t
  std::vector<std::int32_t> cols;   // j_t
  std::vector<double> values;       // y'_t

  std::int64_t count() const { return static_cast<std::int64_t>(values.size()); }

  // Same observations with row/column roles exchanged.
  ObservationSet transposed() const;
};

// k_star per-entry observation matrices obtained by uniform assignment of
// each observation to one of the subsamples. counts(k) holds the number of
// hits per entry, means(k) the average observed value (0 when unobserved).
class SubsampleStack {
 public:
  SubsampleStack(int n, int d, int k_star, double lambda0);

  int n() const { return n_; }
  int d() const { return d_; }
  int k_star() const { return k_star_; }
  double lambda0() const { return lambda0_; }
  double lambda0_minus() const { return lambda0_minus_; }
  double lambda1() const { return lambda1_; }

  const Matrix& means(int k) const { return means_[k]; }
  std::int32_t count(int k, int i, int j) const {
    return counts_[k][static_cast<std::size_t>(i) * d_ + j];
  }

  SubsampleStack transposed() const;

  // Synthetic stack with every entry observed once and equal to y; stands in
  // for the fully-observed noiseless limit in tests and audits.
  static SubsampleStack from_matrix(const Matrix& y, int k_star, double lambda0);

  friend SubsampleStack subsample(const ObservationSet& obs, int n, int d, double lambda0,
                                  int k_star, RngStream& rng);

 private:
  int n_, d_, k_star_;
  double lambda0_, lambda0_minus_, lambda1_;
  std::vector<Matrix> means_;
  std::vector<std::vector<std::int32_t>> counts_;
};

// Paper-exact number of subsamples, 3*ceil(log2(max(n, d))), at least 3.
int default_k_star(int n, int d);

int ceil_log2(std::int64_t x);

// The procedure is tuned for at most log(nd) expected observations per entry.
bool exceeds_sparse_regime(int n, int d, double lambda0);

ObservationSet draw_observations(const BisoInstance& inst, const SamplingConfig& config);
ObservationSet draw_observations(const BisoInstance& inst, const SamplingConfig& config,
                                 RngStream& rng);

// Poisson thinning: each observation goes to either half independently with
// probability 1/2; the halves are samples of intensity lambda0/2.
std::pair<ObservationSet, ObservationSet> split_half(const ObservationSet& obs, RngStream& rng);

SubsampleStack subsample(const ObservationSet& obs, int n, int d, double lambda0, int k_star,
                         RngStream& rng);

}  // namespace biso
