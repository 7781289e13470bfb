#include "biso/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace biso {

std::string model_name(ModelTag tag) {
  switch (tag) {
    case ModelTag::kTwoValue: return "twovalue";
    case ModelTag::kMultiLevel: return "multilevel";
    case ModelTag::kNoisySorting: return "noisysort";
    case ModelTag::kNoisySortingGeneral: return "noisysortgen";
    case ModelTag::kPacking: return "packing";
    case ModelTag::kRandomBiso: return "random";
  }
  throw std::logic_error("model_name: bad tag");
}

ModelTag model_from_name(const std::string& name) {
  if (name == "twovalue") return ModelTag::kTwoValue;
  if (name == "multilevel") return ModelTag::kMultiLevel;
  if (name == "noisysort") return ModelTag::kNoisySorting;
  if (name == "noisysortgen") return ModelTag::kNoisySortingGeneral;
  if (name == "packing") return ModelTag::kPacking;
  if (name == "random") return ModelTag::kRandomBiso;
  throw std::invalid_argument("unknown model: " + name);
}

bool is_bi_isotonic(const BisoInstance& inst) {
  const int n = inst.n(), d = inst.d();
  if (inst.row_perm.size() != n || inst.col_perm.size() != d) return false;
  const Permutation rinv = inst.row_perm.inverse();
  const Permutation cinv = inst.col_perm.inverse();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      const double v = inst.m(rinv(i), cinv(j));
      if (v < 0.0 || v > 1.0) return false;
      if (i + 1 < n && v < inst.m(rinv(i + 1), cinv(j))) return false;
      if (j + 1 < d && v < inst.m(rinv(i), cinv(j + 1))) return false;
    }
  }
  return true;
}

bool is_skew_symmetric(const Matrix& m, double tol) {
  if (m.rows != m.cols) return false;
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j)
      if (std::fabs(m(i, j) + m(j, i) - 1.0) > tol) return false;
  return true;
}

ClassificationMatrix oracle_level_set(const BisoInstance& inst, double p, double h) {
  if (h < 0.0) throw std::invalid_argument("oracle_level_set: h must be >= 0");
  ClassificationMatrix r(inst.n(), inst.d(), p, h);
  for (int i = 0; i < inst.n(); ++i) {
    for (int j = 0; j < inst.d(); ++j) {
      const double v = inst.m(i, j);
      if (v >= p + h)
        r.at(i, j) = Cell::kOne;
      else if (v <= p - h)
        r.at(i, j) = Cell::kZero;
      else
        r.at(i, j) = Cell::kNA;
    }
  }
  return r;
}

namespace {

// Fills inst.m so that the reordering by (row_perm^-1, col_perm^-1) equals
// the oracle-frame matrix: m(a, b) = oracle(row_perm(a), col_perm(b)).
template <typename OracleFn>
Matrix permuted_from_oracle(int n, int d, const Permutation& row_perm, const Permutation& col_perm,
                            OracleFn oracle) {
  Matrix m(n, d);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < d; ++b) m(a, b) = oracle(row_perm(a), col_perm(b));
  return m;
}

void check_probability(double v, const char* what) {
  if (v < 0.0 || v > 1.0) throw std::invalid_argument(std::string(what) + " out of [0,1]");
}

}  // namespace

BisoInstance gen_two_value(int n, int d, double p, double h, const Permutation& row_perm,
                           const Permutation& col_perm, const std::vector<int>& cut) {
  if (n < 1 || d < 1) throw std::invalid_argument("gen_two_value: empty matrix");
  if (row_perm.size() != n || col_perm.size() != d)
    throw std::invalid_argument("gen_two_value: permutation size mismatch");
  if (static_cast<int>(cut.size()) != d)
    throw std::invalid_argument("gen_two_value: cut must have one entry per column");
  check_probability(p - h, "p-h");
  check_probability(p + h, "p+h");
  for (int j = 0; j < d; ++j) {
    if (cut[j] < 0 || cut[j] > n) throw std::invalid_argument("gen_two_value: cut out of range");
    if (j > 0 && cut[j] > cut[j - 1])
      throw std::invalid_argument("gen_two_value: cut must be non-increasing");
  }
  BisoInstance inst;
  inst.model = ModelTag::kTwoValue;
  inst.p = p;
  inst.h = h;
  inst.row_perm = row_perm;
  inst.col_perm = col_perm;
  inst.m = permuted_from_oracle(n, d, row_perm, col_perm, [&](int i, int j) {
    return i < cut[j] ? p + h : p - h;  // i is 0-based, cut counts rows
  });
  return inst;
}

std::vector<int> staircase_diagonal(int n, int d) {
  std::vector<int> cut(d);
  for (int j = 0; j < d; ++j) {
    // evenly spread cuts from n down to n/d-ish, one step per column
    cut[j] = static_cast<int>(std::llround(static_cast<double>(n) * (d - j) / d));
  }
  return cut;
}

std::vector<int> staircase_random(int n, int d, RngStream& rng) {
  std::vector<int> cut(d);
  for (int j = 0; j < d; ++j) cut[j] = static_cast<int>(rng.next_below(n + 1));
  std::sort(cut.begin(), cut.end(), std::greater<int>());
  return cut;
}

std::vector<int> staircase_groups(int n, int d, int groups, std::vector<int>* group_sizes) {
  if (groups < 1 || groups > n) throw std::invalid_argument("staircase_groups: bad group count");
  if (groups > d + 1) throw std::invalid_argument("staircase_groups: more groups than column levels");
  // Deterministic uneven sizes (alternating jitter around n/groups, summing
  // to n) so block boundaries avoid exact halves of typical subranges.
  std::vector<int> sizes(groups, n / groups);
  int rem = n - (n / groups) * groups;
  if (groups > 1) {
    for (int g = 0; g + 1 < groups; g += 2) {
      const int jitter = 1 + (g / 2) % 2;
      if (sizes[g] - jitter >= 1) {
        sizes[g] -= jitter;
        sizes[g + 1] += jitter;
      }
    }
  }
  for (int g = 0; rem > 0; g = (g + 1) % groups) {
    ++sizes[g];
    --rem;
  }
  if (group_sizes) *group_sizes = sizes;
  // Group g (0 = best rows) keeps the high value on the first cols_high(g)
  // columns, levels spread evenly so adjacent groups differ on ~d/(groups+1)
  // columns and every group differs from the constant rows.
  auto cols_high = [&](int g) {
    return static_cast<int>(
        std::llround(static_cast<double>(d) * (groups - g) / (groups + 1.0)));
  };
  std::vector<int> col_cut(d);
  for (int j = 0; j < d; ++j) {
    int c = 0;
    for (int g = 0; g < groups; ++g)
      if (j < cols_high(g)) c += sizes[g];
    col_cut[j] = c;
  }
  return col_cut;
}

namespace {

void median_nested_sizes(int n, int min_group, std::vector<int>& out) {
  if (n <= 3 * min_group) {
    if (n > 0) out.push_back(n);
    return;
  }
  const int mid = min_group | 1;  // odd middle block straddles the median
  const int left = (n - mid) / 2;
  const int right = n - mid - left;
  median_nested_sizes(left, min_group, out);
  out.push_back(mid);
  median_nested_sizes(right, min_group, out);
}

}  // namespace

std::vector<int> staircase_median_nested(int n, int d, int min_group,
                                         std::vector<int>* group_sizes) {
  if (min_group < 3) throw std::invalid_argument("staircase_median_nested: min_group >= 3");
  std::vector<int> sizes;
  median_nested_sizes(n, min_group, sizes);
  const int groups = static_cast<int>(sizes.size());
  if (groups > d + 1)
    throw std::invalid_argument("staircase_median_nested: more groups than column levels");
  if (group_sizes) *group_sizes = sizes;
  auto cols_high = [&](int g) {
    return static_cast<int>(
        std::llround(static_cast<double>(d) * (groups - g) / (groups + 1.0)));
  };
  std::vector<int> col_cut(d);
  for (int j = 0; j < d; ++j) {
    int c = 0;
    for (int g = 0; g < groups; ++g)
      if (j < cols_high(g)) c += sizes[g];
    col_cut[j] = c;
  }
  return col_cut;
}

BisoInstance gen_noisy_sorting(int n, double h, bool generalized, RngStream& rng) {
  if (n < 2) throw std::invalid_argument("gen_noisy_sorting: n must be >= 2");
  if (h <= 0.0 || h >= 0.5) throw std::invalid_argument("gen_noisy_sorting: need 0 < h < 1/2");
  const Permutation pi = Permutation::random(n, rng);
  Matrix canon(n, n, 0.5);  // canon(x, y) for ranks x, y
  if (!generalized) {
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (x != y) canon(x, y) = x < y ? 0.5 + h : 0.5 - h;
  } else {
    // Margin field m(x, y) = h + (1/2-h) * (a_x + b_y)/2 on the upper
    // triangle with a non-increasing, b non-decreasing: keeps the matrix
    // bi-isotonic after the column flip and skew-symmetric by mirroring.
    std::vector<double> a(n), b(n);
    for (int x = 0; x < n; ++x) a[x] = rng.next_unit();
    for (int y = 0; y < n; ++y) b[y] = rng.next_unit();
    std::sort(a.begin(), a.end(), std::greater<double>());
    std::sort(b.begin(), b.end());
    for (int x = 0; x < n; ++x) {
      for (int y = x + 1; y < n; ++y) {
        const double margin = h + (0.5 - h) * 0.5 * (a[x] + b[y]);
        canon(x, y) = 0.5 + margin;
        canon(y, x) = 0.5 - margin;
      }
    }
  }
  BisoInstance inst;
  inst.model = generalized ? ModelTag::kNoisySortingGeneral : ModelTag::kNoisySorting;
  inst.p = 0.5;
  inst.h = h;
  inst.row_perm = pi;
  inst.col_perm = pi.reversed();
  inst.m = Matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inst.m(i, j) = canon(pi(i), pi(j));
  return inst;
}

BisoInstance gen_packing(int n, int d, double p, double h, int l, const std::vector<int>& v) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("gen_packing: n must be even");
  if (static_cast<int>(v.size()) != n) throw std::invalid_argument("gen_packing: v size mismatch");
  if (l < 1 || l > d) throw std::invalid_argument("gen_packing: l out of [1, d]");
  check_probability(p - h, "p-h");
  check_probability(p + h, "p+h");
  int ones = 0;
  for (int x : v) {
    if (x != 0 && x != 1) throw std::invalid_argument("gen_packing: v must be binary");
    ones += x;
  }
  if (ones != n / 2) throw std::invalid_argument("gen_packing: v must contain exactly n/2 ones");
  BisoInstance inst;
  inst.model = ModelTag::kPacking;
  inst.p = p;
  inst.h = h;
  inst.m = Matrix(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) inst.m(i, j) = (v[i] == 1 && j < l) ? p + h : p - h;
  // Row permutation sending flagged rows to the top half, in index order.
  std::vector<std::int32_t> mapping(n);
  int next_top = 0, next_bottom = n / 2;
  for (int i = 0; i < n; ++i) mapping[i] = v[i] == 1 ? next_top++ : next_bottom++;
  inst.row_perm = Permutation::from_mapping(mapping);
  inst.col_perm = Permutation::identity(d);
  return inst;
}

int packing_column_count(double sigma, double lambda0, double h, int d) {
  // epsilon keeps exact-integer ratios from flooring one short
  const double raw = std::floor(0.16 * sigma * sigma / (lambda0 * h * h) + 1e-9);
  return std::max(1, std::min(d, static_cast<int>(raw)));
}

BisoInstance gen_multi_level(int n, int d, const std::vector<double>& values, RngStream& rng) {
  const int k = static_cast<int>(values.size());
  if (k < 2) throw std::invalid_argument("gen_multi_level: need at least 2 values");
  for (int t = 0; t < k; ++t) {
    check_probability(values[t], "value");
    if (t > 0 && values[t] <= values[t - 1])
      throw std::invalid_argument("gen_multi_level: values must be strictly increasing");
  }
  // One random staircase per upper level, nested by pointwise sorting: the
  // r-th largest of componentwise non-increasing sequences is non-increasing.
  std::vector<std::vector<int>> cuts(k - 1);
  for (int t = 0; t < k - 1; ++t) cuts[t] = staircase_random(n, d, rng);
  std::vector<int> column(k - 1);
  for (int j = 0; j < d; ++j) {
    for (int t = 0; t < k - 1; ++t) column[t] = cuts[t][j];
    std::sort(column.begin(), column.end(), std::greater<int>());
    for (int t = 0; t < k - 1; ++t) cuts[t][j] = column[t];
  }
  RngStream perm_rng = rng.child(1);
  BisoInstance inst;
  inst.model = ModelTag::kMultiLevel;
  inst.row_perm = Permutation::random(n, perm_rng);
  inst.col_perm = Permutation::random(d, perm_rng);
  inst.m = permuted_from_oracle(n, d, inst.row_perm, inst.col_perm, [&](int i, int j) {
    int level = 0;  // index into values; cuts[t] bounds the region >= values[t+1]
    while (level < k - 1 && i < cuts[level][j]) ++level;
    return values[level];
  });
  return inst;
}

BisoInstance gen_random_biso(int n, int d, RngStream& rng) {
  Matrix oracle(n, d);
  for (double& v : oracle.data) v = rng.next_unit();
  // Monotone rearrangement: sort rows then columns (descending) until stable.
  bool changed = true;
  std::vector<double> col(n);
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      double* row = &oracle.data[static_cast<std::size_t>(i) * d];
      if (!std::is_sorted(row, row + d, std::greater<double>())) {
        std::sort(row, row + d, std::greater<double>());
        changed = true;
      }
    }
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < n; ++i) col[i] = oracle(i, j);
      if (!std::is_sorted(col.begin(), col.end(), std::greater<double>())) {
        std::sort(col.begin(), col.end(), std::greater<double>());
        for (int i = 0; i < n; ++i) oracle(i, j) = col[i];
        changed = true;
      }
    }
  }
  BisoInstance inst;
  inst.model = ModelTag::kRandomBiso;
  inst.row_perm = Permutation::random(n, rng);
  inst.col_perm = Permutation::random(d, rng);
  inst.m = permuted_from_oracle(n, d, inst.row_perm, inst.col_perm,
                                [&](int i, int j) { return oracle(i, j); });
  return inst;
}

}  // namespace biso
