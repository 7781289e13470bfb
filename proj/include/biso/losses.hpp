#pragma once

#include <cstdint>
#include <vector>

#include "biso/model.hpp"
#include "biso/permutation.hpp"

namespace biso {

// Core confusion count at threshold p, tolerance h: positions whose value is
// <= p-h under the truth reordering but >= p+h under the estimate reordering,
// plus the symmetric term. O(nd).
std::int64_t level_confusions(const Matrix& m, const Permutation& row_truth,
                              const Permutation& col_truth, const Permutation& row_est,
                              const Permutation& col_est, double p, double h);

// Confusions with both permutations estimated.
std::int64_t loss_lph(const BisoInstance& inst, const Permutation& pi_hat,
                      const Permutation& eta_hat, double p, double h);

// Row-only / column-only variants (the other side fixed to the truth).
std::int64_t loss_rph(const BisoInstance& inst, const Permutation& pi_hat, double p, double h);
std::int64_t loss_cph(const BisoInstance& inst, const Permutation& eta_hat, double p, double h);

// Classification errors on the decided cells of `truth`; an NA estimate on a
// decided cell counts as an error. Shapes and (p, h) must match.
std::int64_t loss_l01na(const ClassificationMatrix& truth, const ClassificationMatrix& estimate);

// Squared Frobenius distance between the two reorderings of m.
double loss_frobenius_perm(const BisoInstance& inst, const Permutation& pi_hat,
                           const Permutation& eta_hat);

// Discordant ordered pairs, O(n log n) by merge counting.
std::int64_t kendall_tau(const Permutation& pi1, const Permutation& pi2);

// Diagnostic: sum over columns in col_subset of min(#rows in row_subset below
// p-h, #rows in row_subset above p+h); the maximal confusion a reshuffle of
// row_subset could cause on those columns.
std::int64_t rtilde_diag(const BisoInstance& inst, const std::vector<std::int32_t>& row_subset,
                         const std::vector<std::int32_t>& col_subset, double p, double h);

}  // namespace biso
