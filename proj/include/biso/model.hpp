#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biso/matrix.hpp"
#include "biso/permutation.hpp"
#include "biso/rng.hpp"

namespace biso {

enum class ModelTag {
  kTwoValue,
  kMultiLevel,
  kNoisySorting,
  kNoisySortingGeneral,
  kPacking,
  kRandomBiso,
};

std::string model_name(ModelTag tag);
ModelTag model_from_name(const std::string& name);

// Ground-truth matrix together with the permutations that make it
// bi-isotonic: m(row_perm^-1(i), col_perm^-1(j)) is non-increasing in both
// i and j. p/h record the generator's threshold band when it has one.
struct BisoInstance {
  Matrix m;
  Permutation row_perm;
  Permutation col_perm;
  ModelTag model = ModelTag::kRandomBiso;
  double p = 0.0;
  double h = 0.0;

  int n() const { return m.rows; }
  int d() const { return m.cols; }
};

// O(nd) scan of the bi-isotonicity invariant (and entry range).
bool is_bi_isotonic(const BisoInstance& inst);

// Skew symmetry m + m^T = 1; holds for the noisy-sorting models.
bool is_skew_symmetric(const Matrix& m, double tol = 1e-12);

enum class Cell : std::uint8_t { kZero = 0, kOne = 1, kNA = 2 };

// Ternary level-set matrix at threshold p, tolerance h.
struct ClassificationMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Cell> cells;
  double p = 0.0;
  double h = 0.0;

  ClassificationMatrix() = default;
  ClassificationMatrix(int r, int c, double p_, double h_, Cell fill = Cell::kNA)
      : rows(r), cols(c), cells(static_cast<std::size_t>(r) * c, fill), p(p_), h(h_) {}

  Cell& at(int i, int j) { return cells[static_cast<std::size_t>(i) * cols + j]; }
  Cell at(int i, int j) const { return cells[static_cast<std::size_t>(i) * cols + j]; }
};

// Exact level set of the truth: 1 iff m_ij >= p+h, 0 iff m_ij <= p-h, NA on
// the open band in between (checked in that order, so h = 0 ties go to 1).
ClassificationMatrix oracle_level_set(const BisoInstance& inst, double p, double h);

// Two-value matrix {p-h, p+h}. `cut` has one entry per column in oracle
// order: the last row index (1-based count, 0..n) holding the high value.
// Must be non-increasing.
BisoInstance gen_two_value(int n, int d, double p, double h, const Permutation& row_perm,
                           const Permutation& col_perm, const std::vector<int>& cut);

// Staircase builders for gen_two_value.
std::vector<int> staircase_diagonal(int n, int d);
std::vector<int> staircase_random(int n, int d, RngStream& rng);
// `groups` blocks of rows with distinct column cuts; sizes are jittered so
// block boundaries avoid exact halves of [n].
std::vector<int> staircase_groups(int n, int d, int groups, std::vector<int>* group_sizes = nullptr);
// Recursive block layout whose running median always falls strictly inside a
// block (so majority-vote halving resolves whole blocks at every depth).
// min_group controls the middle block size, at least 3.
std::vector<int> staircase_median_nested(int n, int d, int min_group = 5,
                                         std::vector<int>* group_sizes = nullptr);

// Square tournament matrix around 1/2 with margin h; strict variant takes
// exactly the values {1/2-h, 1/2, 1/2+h}, the generalized variant draws
// entries at distance >= h from 1/2 on the correct side.
BisoInstance gen_noisy_sorting(int n, double h, bool generalized, RngStream& rng);

// Block construction used for hardness experiments: rows flagged by v carry
// p+h on the first `l` columns, everything else is p-h. v must contain
// exactly n/2 ones.
BisoInstance gen_packing(int n, int d, double p, double h, int l, const std::vector<int>& v);

// Column count for the hard-instance family, capped at d.
int packing_column_count(double sigma, double lambda0, double h, int d);

// K-valued matrix from nested random staircases; `values` strictly increasing.
BisoInstance gen_multi_level(int n, int d, const std::vector<double>& values, RngStream& rng);

// Generic instance: nd uniforms pushed to the nearest bi-isotonic arrangement
// by repeated row/column sorting, then randomly permuted.
BisoInstance gen_random_biso(int n, int d, RngStream& rng);

}  // namespace biso
