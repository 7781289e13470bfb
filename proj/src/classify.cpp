#include "biso/classify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace biso {

BlockGrid block_grid(int n, int d, double sigma, double lambda0, double h) {
  if (h <= 0.0) throw std::invalid_argument("block_grid: h must be > 0");
  if (n < 1 || d < 1) throw std::invalid_argument("block_grid: empty matrix");
  if (lambda0 <= 0.0) throw std::invalid_argument("block_grid: lambda0 must be > 0");
  BlockGrid g;
  g.n = n;
  g.d = d;
  const double s = std::max(sigma, 1.0);
  const double log_nd = std::log(static_cast<double>(n) * d);
  g.k_h = static_cast<int>(
      std::ceil(s * std::sqrt(512.0 * log_nd * n / (d * lambda0 * h * h))));
  g.l_h = static_cast<int>(
      std::ceil(s * std::sqrt(512.0 * log_nd * d / (n * lambda0 * h * h))));
  if (g.k_h >= n || g.l_h >= d) {
    g.degenerate = true;
    return g;
  }
  g.block_rows = std::max(n / g.k_h, 1);
  g.block_cols = std::max(d / g.l_h, 1);
  g.row_block.resize(n);
  for (int i = 0; i < n; ++i) g.row_block[i] = std::min(i / g.k_h, g.block_rows - 1);
  g.col_block.resize(d);
  for (int j = 0; j < d; ++j) g.col_block[j] = std::min(j / g.l_h, g.block_cols - 1);
  return g;
}

Matrix block_average(const ObservationSet& obs, const Permutation& pi_hat,
                     const Permutation& eta_hat, const BlockGrid& grid) {
  if (grid.degenerate) throw std::invalid_argument("block_average: degenerate grid");
  if (pi_hat.size() != grid.n || eta_hat.size() != grid.d)
    throw std::invalid_argument("block_average: permutation size mismatch");
  const int blocks = grid.block_rows * grid.block_cols;
  std::vector<double> sum(blocks, 0.0);
  std::vector<std::int64_t> count(blocks, 0);
  for (std::int64_t t = 0; t < obs.count(); ++t) {
    const int b = grid.block_of(pi_hat(obs.rows[t]), eta_hat(obs.cols[t]));
    sum[b] += obs.values[t];
    count[b] += 1;
  }
  Matrix out(grid.n, grid.d);
  for (int i = 0; i < grid.n; ++i) {
    for (int j = 0; j < grid.d; ++j) {
      const int b = grid.block_of(i, j);
      out(i, j) = count[b] > 0 ? sum[b] / count[b] : 0.0;
    }
  }
  return out;
}

ClassificationMatrix classify_plugin(const Matrix& block_avg, double p, double h,
                                     const Permutation& pi_hat, const Permutation& eta_hat) {
  const int n = block_avg.rows, d = block_avg.cols;
  if (pi_hat.size() != n || eta_hat.size() != d)
    throw std::invalid_argument("classify_plugin: permutation size mismatch");
  ClassificationMatrix r(n, d, p, h);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      r.at(i, j) = block_avg(pi_hat(i), eta_hat(j)) >= p ? Cell::kOne : Cell::kZero;
  return r;
}

ThresholdSpec pipeline_threshold_vector(double p, double h) {
  if (h <= 0.0 || h > 1.0) throw std::invalid_argument("pipeline_threshold_vector: h in (0,1]");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("pipeline_threshold_vector: p in [0,1]");
  ThresholdSpec spec;
  const int top = static_cast<int>(std::ceil(std::log2(1.0 / h)));
  for (int s = 1; s <= top; ++s) {
    const double hs = h * std::pow(2.0, s - 2);
    for (int t : {-1, 1}) spec.push_back({p + t * hs, hs});
  }
  for (int s = 2; s <= 3; ++s) {
    const double hs = h * std::pow(2.0, -s);
    for (int t : {-1, 1}) spec.push_back({p + 3.0 * t * hs, hs});
  }
  // The construction can step outside [0,1]; clip and drop exact duplicates.
  for (ThresholdPair& tp : spec) tp.p = std::clamp(tp.p, 0.0, 1.0);
  std::sort(spec.begin(), spec.end(), [](const ThresholdPair& a, const ThresholdPair& b) {
    return a.p != b.p ? a.p < b.p : a.h < b.h;
  });
  spec.erase(std::unique(spec.begin(), spec.end(),
                         [](const ThresholdPair& a, const ThresholdPair& b) {
                           return a.p == b.p && a.h == b.h;
                         }),
             spec.end());
  return spec;
}

PipelineResult estimate_level_set(const ObservationSet& obs, double p, double h,
                                  const ClassifyConfig& config, RngStream& rng) {
  const int n = obs.n, d = obs.d;
  if (n < 1 || d < 1) throw std::invalid_argument("estimate_level_set: empty observation set");

  RngStream split_rng = rng.child(0);
  auto [rank_half, avg_half] = split_half(obs, split_rng);

  const double nd = static_cast<double>(n) * d;
  RankConfig rank_config;
  rank_config.sigma = config.sigma;
  rank_config.delta = config.delta_override > 0.0 ? config.delta_override : 1.0 / (nd * nd);
  rank_config.scale = config.scale;
  rank_config.k_star_override = config.k_star_override;

  PipelineResult out;
  RngStream rank_rng = rng.child(1);
  const ThresholdSpec spec = pipeline_threshold_vector(p, h);
  RankPairResult ranked =
      rank_pair(rank_half, spec, RankPolicy::kSharedSpec, rank_config, rank_rng);
  out.row_est = std::move(ranked.row);
  out.col_est = std::move(ranked.col);

  // Window sizes follow the intensity of the data actually averaged.
  out.grid = block_grid(n, d, config.sigma, avg_half.lambda0, h);
  if (out.grid.degenerate) {
    out.r_hat = ClassificationMatrix(n, d, p, h, Cell::kOne);
    return out;
  }
  const Matrix avg = block_average(avg_half, out.row_est.pi_hat, out.col_est.pi_hat, out.grid);
  out.r_hat = classify_plugin(avg, p, h, out.row_est.pi_hat, out.col_est.pi_hat);
  return out;
}

Matrix reconstruct_two_value(const ClassificationMatrix& r, double p, double h) {
  Matrix m(r.rows, r.cols, p - h);
  for (int i = 0; i < r.rows; ++i)
    for (int j = 0; j < r.cols; ++j)
      if (r.at(i, j) == Cell::kOne) m(i, j) = p + h;
  return m;
}

}  // namespace biso
