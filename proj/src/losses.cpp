#include "biso/losses.hpp"

#include <algorithm>
#include <stdexcept>

namespace biso {

std::int64_t level_confusions(const Matrix& m, const Permutation& row_truth,
                              const Permutation& col_truth, const Permutation& row_est,
                              const Permutation& col_est, double p, double h) {
  const int n = m.rows, d = m.cols;
  if (row_truth.size() != n || row_est.size() != n || col_truth.size() != d ||
      col_est.size() != d)
    throw std::invalid_argument("level_confusions: permutation size mismatch");
  const Permutation rt = row_truth.inverse();
  const Permutation ct = col_truth.inverse();
  const Permutation re = row_est.inverse();
  const Permutation ce = col_est.inverse();
  const double lo = p - h, hi = p + h;
  std::int64_t count = 0;
  for (int i = 0; i < n; ++i) {
    const int ti = rt(i), ei = re(i);
    for (int j = 0; j < d; ++j) {
      const double a = m(ti, ct(j));
      const double b = m(ei, ce(j));
      if (a <= lo && b >= hi) ++count;
      if (a >= hi && b <= lo) ++count;
    }
  }
  return count;
}

std::int64_t loss_lph(const BisoInstance& inst, const Permutation& pi_hat,
                      const Permutation& eta_hat, double p, double h) {
  return level_confusions(inst.m, inst.row_perm, inst.col_perm, pi_hat, eta_hat, p, h);
}

std::int64_t loss_rph(const BisoInstance& inst, const Permutation& pi_hat, double p, double h) {
  const Permutation id = Permutation::identity(inst.d());
  return level_confusions(inst.m, inst.row_perm, id, pi_hat, id, p, h);
}

std::int64_t loss_cph(const BisoInstance& inst, const Permutation& eta_hat, double p, double h) {
  const Permutation id = Permutation::identity(inst.n());
  return level_confusions(inst.m, id, inst.col_perm, id, eta_hat, p, h);
}

std::int64_t loss_l01na(const ClassificationMatrix& truth, const ClassificationMatrix& estimate) {
  if (truth.rows != estimate.rows || truth.cols != estimate.cols)
    throw std::invalid_argument("loss_l01na: shape mismatch");
  if (truth.p != estimate.p || truth.h != estimate.h)
    throw std::invalid_argument("loss_l01na: (p, h) mismatch");
  std::int64_t errors = 0;
  for (std::size_t idx = 0; idx < truth.cells.size(); ++idx) {
    const Cell t = truth.cells[idx];
    if (t == Cell::kNA) continue;
    if (estimate.cells[idx] != t) ++errors;
  }
  return errors;
}

double loss_frobenius_perm(const BisoInstance& inst, const Permutation& pi_hat,
                           const Permutation& eta_hat) {
  const int n = inst.n(), d = inst.d();
  if (pi_hat.size() != n || eta_hat.size() != d)
    throw std::invalid_argument("loss_frobenius_perm: permutation size mismatch");
  const Permutation rt = inst.row_perm.inverse();
  const Permutation ct = inst.col_perm.inverse();
  const Permutation re = pi_hat.inverse();
  const Permutation ce = eta_hat.inverse();
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      const double diff = inst.m(re(i), ce(j)) - inst.m(rt(i), ct(j));
      total += diff * diff;
    }
  }
  return total;
}

namespace {

// Inversions of seq by merge counting; modifies seq.
std::int64_t merge_count(std::vector<std::int32_t>& seq, std::vector<std::int32_t>& buf, int lo,
                         int hi) {
  if (hi - lo <= 1) return 0;
  const int mid = (lo + hi) / 2;
  std::int64_t inv = merge_count(seq, buf, lo, mid) + merge_count(seq, buf, mid, hi);
  int a = lo, b = mid, out = lo;
  while (a < mid && b < hi) {
    if (seq[a] <= seq[b]) {
      buf[out++] = seq[a++];
    } else {
      inv += mid - a;
      buf[out++] = seq[b++];
    }
  }
  while (a < mid) buf[out++] = seq[a++];
  while (b < hi) buf[out++] = seq[b++];
  std::copy(buf.begin() + lo, buf.begin() + hi, seq.begin() + lo);
  return inv;
}

}  // namespace

std::int64_t kendall_tau(const Permutation& pi1, const Permutation& pi2) {
  const int n = pi1.size();
  if (pi2.size() != n) throw std::invalid_argument("kendall_tau: size mismatch");
  // Discordant pairs = inversions of pi2 read in pi1-rank order.
  const Permutation inv1 = pi1.inverse();
  std::vector<std::int32_t> seq(n);
  for (int r = 0; r < n; ++r) seq[r] = pi2(inv1(r));
  std::vector<std::int32_t> buf(n);
  return merge_count(seq, buf, 0, n);
}

std::int64_t rtilde_diag(const BisoInstance& inst, const std::vector<std::int32_t>& row_subset,
                         const std::vector<std::int32_t>& col_subset, double p, double h) {
  const double lo = p - h, hi = p + h;
  std::int64_t total = 0;
  for (std::int32_t j : col_subset) {
    if (j < 0 || j >= inst.d()) throw std::invalid_argument("rtilde_diag: column out of range");
    std::int64_t below = 0, above = 0;
    for (std::int32_t i : row_subset) {
      if (i < 0 || i >= inst.n()) throw std::invalid_argument("rtilde_diag: row out of range");
      const double v = inst.m(i, j);
      if (v <= lo) ++below;
      if (v >= hi) ++above;
    }
    total += std::min(below, above);
  }
  return total;
}

}  // namespace biso
