#pragma once

#include <vector>

#include "biso/model.hpp"
#include "biso/sampling.hpp"
#include "biso/sohlob.hpp"

namespace biso {

// Regular tiling of [n] x [d] by k_h x l_h windows; the last block in each
// direction absorbs the remainder. `degenerate` marks the case k_h >= n or
// l_h >= d, where the estimator is the constant-1 matrix.
struct BlockGrid {
  int n = 0, d = 0;
  int k_h = 0, l_h = 0;
  bool degenerate = false;
  int block_rows = 0, block_cols = 0;
  std::vector<int> row_block;  // size n, block-row index per (reordered) row
  std::vector<int> col_block;  // size d

  int block_of(int i, int j) const { return row_block[i] * block_cols + col_block[j]; }
};

BlockGrid block_grid(int n, int d, double sigma, double lambda0, double h);

// Averages the observations per block after reindexing positions by the
// estimated permutations; returns the block-constant matrix in reordered
// coordinates (0 on empty blocks).
Matrix block_average(const ObservationSet& obs, const Permutation& pi_hat,
                     const Permutation& eta_hat, const BlockGrid& grid);

// Plug-in level-set estimate: cell (i,j) is 1 iff the block average at the
// reordered position is >= p. Never NA.
ClassificationMatrix classify_plugin(const Matrix& block_avg, double p, double h,
                                     const Permutation& pi_hat, const Permutation& eta_hat);

// Threshold/tolerance vector the two-stage pipeline feeds to the ranking
// pass; clipped to [0,1] and deduplicated.
ThresholdSpec pipeline_threshold_vector(double p, double h);

struct ClassifyConfig {
  double sigma = 1.0;
  double scale = 1.0;
  double delta_override = 0.0;  // 0 = (nd)^-2
  int k_star_override = 0;
};

struct PipelineResult {
  ClassificationMatrix r_hat;
  RankEstimate row_est;
  RankEstimate col_est;
  BlockGrid grid;
};

// Two-stage estimator: split the sample in half, rank on the first half with
// the pipeline threshold vector, block-average and threshold the second half
// (window sizes computed at the split intensity lambda0/2).
PipelineResult estimate_level_set(const ObservationSet& obs, double p, double h,
                                  const ClassifyConfig& config, RngStream& rng);

// Convenience: block-constant matrix reconstruction p-h + 2h*R.
Matrix reconstruct_two_value(const ClassificationMatrix& r, double p, double h);

}  // namespace biso
