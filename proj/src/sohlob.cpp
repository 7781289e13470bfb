#include "biso/sohlob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace biso {

AlgoConstants AlgoConstants::make(int n, int d, double sigma, double lambda0, double delta,
                                  double scale) {
  if (n < 1 || d < 1) throw std::invalid_argument("AlgoConstants: empty matrix");
  if (lambda0 <= 0.0) throw std::invalid_argument("AlgoConstants: lambda0 must be > 0");
  if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("AlgoConstants: delta in (0,1)");
  if (scale <= 0.0) throw std::invalid_argument("AlgoConstants: scale must be > 0");
  AlgoConstants c;
  c.n = n;
  c.d = d;
  c.sigma = sigma;
  c.lambda0 = lambda0;
  c.delta = delta;
  c.scale = scale;
  const int log_term = std::max(1, ceil_log2(std::max(n, d)));
  c.k_star = 3 * log_term;
  c.lambda0_minus = lambda0 / c.k_star;
  c.lambda1 = 1.0 - std::exp(-c.lambda0_minus);
  const double e = std::exp(1.0);
  const double big_log = std::log(24.0 * n * d * std::sqrt(static_cast<double>(std::max(n, d))) *
                                  log_term / delta);
  c.rho = scale * std::max(1.0, sigma) * e * std::sqrt(8.0 * big_log);
  c.gamma = scale * 2.0 * big_log / (c.lambda1 * e * e);
  return c;
}

void validate_spec(const ThresholdSpec& spec) {
  if (spec.empty()) throw std::invalid_argument("threshold spec: empty");
  for (const ThresholdPair& t : spec) {
    if (t.p < 0.0 || t.p > 1.0) throw std::invalid_argument("threshold spec: p out of [0,1]");
    if (t.h <= 0.0 || t.h > 1.0) throw std::invalid_argument("threshold spec: h out of (0,1]");
  }
}

namespace {

// Partial column means of y over the rows in e, restricted to all d columns.
std::vector<double> column_means(const Matrix& y, const std::vector<std::int32_t>& e) {
  std::vector<double> acc(y.cols, 0.0);
  for (std::int32_t i : e) {
    const double* row = &y.data[static_cast<std::size_t>(i) * y.cols];
    for (int j = 0; j < y.cols; ++j) acc[j] += row[j];
  }
  const double inv = 1.0 / static_cast<double>(e.size());
  for (double& v : acc) v *= inv;
  return acc;
}

void add_edge(BitMatrix& graph, int i, int ip, GraphUpdateStats& stats) {
  if (graph.set(i, ip)) {
    ++stats.edges_added;
    if (graph.get(ip, i)) ++stats.antisym_conflicts;
  }
}

// Sets edges for every ordered pair with mean gap above thr. Sorted sweep:
// sources in ascending mean order only gain targets, so a moving boundary
// visits each candidate once; the work is O(|e| log |e| + edges).
void edges_from_means(BitMatrix& graph, const std::vector<std::int32_t>& e,
                      const std::vector<double>& means, double thr, GraphUpdateStats& stats) {
  const int sz = static_cast<int>(e.size());
  std::vector<int> order(sz);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return means[a] < means[b]; });
  int bound = 0;
  for (int a = 0; a < sz; ++a) {
    const double limit = means[order[a]] - thr;
    while (bound < sz && means[order[bound]] < limit) ++bound;
    // strictly below limit <=> mean gap > thr
    for (int b = 0; b < bound; ++b) add_edge(graph, e[order[a]], e[order[b]], stats);
  }
}

void edges_from_means_literal(BitMatrix& graph, const std::vector<std::int32_t>& e,
                              const std::vector<double>& means, double thr,
                              GraphUpdateStats& stats) {
  const int sz = static_cast<int>(e.size());
  for (int a = 0; a < sz; ++a)
    for (int b = 0; b < sz; ++b)
      if (a != b && means[a] - means[b] > thr) add_edge(graph, e[a], e[b], stats);
}

}  // namespace

std::vector<std::int32_t> envelope(int s, const std::vector<std::vector<std::int32_t>>& partition,
                                   const std::vector<std::uint8_t>& active, const Matrix& ytilde,
                                   double p, double h, const AlgoConstants& c) {
  const int r = static_cast<int>(partition.size());
  if (s < 0 || s >= r || active.size() != partition.size())
    throw std::invalid_argument("envelope: bad set index");
  if (!active[s]) throw std::invalid_argument("envelope: set is not active");
  const int d = ytilde.cols;

  int lowest = -1, highest = -1;
  for (int t = 0; t < r; ++t) {
    if (active[t]) {
      if (lowest < 0) lowest = t;
      highest = t;
    }
  }

  // Lower bracket: questions on which the nearest active set below s sits
  // uniformly above the band, detected through its partial column means.
  std::vector<std::int32_t> q_under;
  if (s == lowest) {
    q_under.resize(d);
    std::iota(q_under.begin(), q_under.end(), 0);
  } else {
    int s_under = -1;
    for (int t = s - 1; t >= 0; --t)
      if (active[t]) {
        s_under = t;
        break;
      }
    const std::vector<double> mean = column_means(ytilde, partition[s_under]);
    const double thr = c.lambda1 * (p + h) -
                       c.rho * std::sqrt(c.lambda1 / static_cast<double>(partition[s_under].size()));
    for (int j = 0; j < d; ++j)
      if (mean[j] >= thr) q_under.push_back(j);
  }

  // Upper bracket, symmetric with the nearest active set above s.
  std::vector<std::int32_t> q_over;
  if (s == highest) {
    q_over.resize(d);
    std::iota(q_over.begin(), q_over.end(), 0);
  } else {
    int s_over = -1;
    for (int t = s + 1; t < r; ++t)
      if (active[t]) {
        s_over = t;
        break;
      }
    const std::vector<double> mean = column_means(ytilde, partition[s_over]);
    const double thr = c.lambda1 * (p - h) +
                       c.rho * std::sqrt(c.lambda1 / static_cast<double>(partition[s_over].size()));
    for (int j = 0; j < d; ++j)
      if (mean[j] <= thr) q_over.push_back(j);
  }

  std::vector<std::int32_t> q;
  std::set_intersection(q_under.begin(), q_under.end(), q_over.begin(), q_over.end(),
                        std::back_inserter(q));
  return q;
}

void update_graph(BitMatrix& graph, const std::vector<std::int32_t>& e,
                  const std::vector<std::int32_t>& qprime, const Matrix& yb,
                  const AlgoConstants& c, GraphUpdateStats* stats, bool literal_pairs) {
  GraphUpdateStats local;
  GraphUpdateStats& st = stats ? *stats : local;
  const double q_size = static_cast<double>(qprime.size());
  if (q_size <= c.gamma) return;
  const double thr = 2.0 * c.rho * std::sqrt(c.lambda1 / q_size);
  std::vector<double> means(e.size(), 0.0);
  for (std::size_t a = 0; a < e.size(); ++a) {
    const double* row = &yb.data[static_cast<std::size_t>(e[a]) * yb.cols];
    double acc = 0.0;
    for (std::int32_t j : qprime) acc += row[j];
    means[a] = acc / q_size;
  }
  if (literal_pairs)
    edges_from_means_literal(graph, e, means, thr, st);
  else
    edges_from_means(graph, e, means, thr, st);
}

void scan_and_update(const Matrix& ya, const Matrix& yb, const std::vector<std::int32_t>& e,
                     const std::vector<std::int32_t>& q, BitMatrix& graph, const AlgoConstants& c,
                     RankDiagnostics* diag) {
  if (q.empty()) return;
  const int e_size = static_cast<int>(e.size());
  const int q_size = static_cast<int>(q.size());
  GraphUpdateStats stats;

  // Column means of ya over e, and the questions sorted by them; every band
  // below is then a contiguous range of the sorted order.
  std::vector<double> mu(q_size, 0.0);
  for (std::int32_t i : e) {
    const double* row = &ya.data[static_cast<std::size_t>(i) * ya.cols];
    for (int a = 0; a < q_size; ++a) mu[a] += row[q[a]];
  }
  for (double& v : mu) v /= static_cast<double>(e_size);

  std::vector<int> order(q_size);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return mu[a] < mu[b]; });
  std::vector<double> sorted_mu(q_size);
  std::vector<std::int32_t> sorted_q(q_size);
  for (int r = 0; r < q_size; ++r) {
    sorted_mu[r] = mu[order[r]];
    sorted_q[r] = q[order[r]];
  }

  // Row prefix sums over the sorted question order: partial row means on any
  // band are O(1) lookups afterwards.
  std::vector<double> prefix(static_cast<std::size_t>(e_size) * (q_size + 1), 0.0);
  for (int a = 0; a < e_size; ++a) {
    const double* row = &yb.data[static_cast<std::size_t>(e[a]) * yb.cols];
    double* pre = &prefix[static_cast<std::size_t>(a) * (q_size + 1)];
    for (int r = 0; r < q_size; ++r) pre[r + 1] = pre[r] + row[sorted_q[r]];
  }

  std::vector<double> means(e_size);
  std::int64_t calls = 0;
  auto exec_range = [&](int lo, int hi) {
    const int count = hi - lo;
    if (static_cast<double>(count) <= c.gamma) return;
    const double thr = 2.0 * c.rho * std::sqrt(c.lambda1 / count);
    for (int a = 0; a < e_size; ++a) {
      const double* pre = &prefix[static_cast<std::size_t>(a) * (q_size + 1)];
      means[a] = (pre[hi] - pre[lo]) / count;
    }
    edges_from_means(graph, e, means, thr, stats);
  };
  auto lower = [&](double v) {
    return static_cast<int>(std::lower_bound(sorted_mu.begin(), sorted_mu.end(), v) -
                            sorted_mu.begin());
  };
  auto upper = [&](double v) {
    return static_cast<int>(std::upper_bound(sorted_mu.begin(), sorted_mu.end(), v) -
                            sorted_mu.begin());
  };

  const double w = 2.0 * c.rho * std::sqrt(c.lambda1 / static_cast<double>(e_size));
  const int c_max = static_cast<int>(
      std::ceil(std::sqrt(c.lambda1 * static_cast<double>(e_size)) / (2.0 * c.rho) + 1.0));
  for (int a = 0; a < q_size; ++a) {
    const double mj = sorted_mu[a];
    // questions whose means sit within w of j's
    ++calls;
    exec_range(lower(mj - w), upper(mj + w));
    // nested margin bands left and right of j; growing a band to an identical
    // index range repeats the exact same update, so only new ranges execute
    int left_lo = -1, left_hi = -1, right_lo = -1, right_hi = -1;
    for (int cc = 2; cc <= c_max; ++cc) {
      // means in [mj + w, mj + cc*w]: questions detected below j, by margin
      const int llo = lower(mj + w), lhi = upper(mj + cc * w);
      ++calls;
      if (llo != left_lo || lhi != left_hi) {
        exec_range(llo, lhi);
        left_lo = llo;
        left_hi = lhi;
      }
      // means in [mj - cc*w, mj - w]: questions detected above j
      const int rlo = lower(mj - cc * w), rhi = upper(mj - w);
      ++calls;
      if (rlo != right_lo || rhi != right_hi) {
        exec_range(rlo, rhi);
        right_lo = rlo;
        right_hi = rhi;
      }
    }
  }

  if (diag) {
    diag->update_calls += calls;
    diag->edges_total += stats.edges_added;
    diag->antisym_conflicts += stats.antisym_conflicts;
  }
}

Trisection graph_trisect(const std::vector<std::int32_t>& e, const BitMatrix& graph) {
  if (e.empty()) throw std::invalid_argument("graph_trisect: empty set");
  Trisection tri;
  const int sz = static_cast<int>(e.size());
  const std::vector<std::uint64_t> mask = graph.make_row_mask(e);
  std::vector<int> wins(sz, 0), losses(sz, 0);
  std::vector<int> local(graph.size(), -1);
  for (int a = 0; a < sz; ++a) local[e[a]] = a;
  for (int a = 0; a < sz; ++a) {
    wins[a] = graph.row_count_masked(e[a], mask);
    for (int b = 0; b < sz; ++b)
      if (graph.get(e[a], e[b])) ++losses[b];
  }
  for (int a = 0; a < sz; ++a) {
    const bool out = 2 * wins[a] > sz;
    const bool in = 2 * losses[a] > sz;
    // contradictory majorities stay undecided so (o, p, i) partitions e
    if (out && !in)
      tri.o.push_back(e[a]);
    else if (in && !out)
      tri.i.push_back(e[a]);
    else
      tri.p.push_back(e[a]);
  }
  return tri;
}

namespace {

Permutation compatible_permutation(const std::vector<std::vector<std::int32_t>>& partition,
                                   int n) {
  std::vector<std::int32_t> mapping(n, -1);
  std::int32_t rank = 0;
  for (const auto& block : partition) {
    std::vector<std::int32_t> sorted = block;
    std::sort(sorted.begin(), sorted.end());
    for (std::int32_t i : sorted) mapping[i] = rank++;
  }
  return Permutation::from_mapping(std::move(mapping));
}

}  // namespace

RankEstimate sohlob_rank(const SubsampleStack& stack, const ThresholdSpec& spec,
                         const AlgoConstants& c, RunTrace* trace) {
  validate_spec(spec);
  const int n = stack.n();
  const int m = static_cast<int>(spec.size());

  RankEstimate est;
  est.graph = BitMatrix(n);
  if (n == 1) {
    est.pi_hat = Permutation::identity(1);
    est.final_partition = {{0}};
    return est;
  }

  double h_gate = 0.0;
  for (const ThresholdPair& t : spec) h_gate = std::max(h_gate, t.h);

  std::vector<std::vector<std::int32_t>> partition(1);
  partition[0].resize(n);
  std::iota(partition[0].begin(), partition[0].end(), 0);
  std::vector<std::uint8_t> active{static_cast<std::uint8_t>(c.gate(n, h_gate) ? 1 : 0)};

  const int cap = std::max(1, ceil_log2(n));
  int round = 0;
  auto any_active = [&] {
    return std::any_of(active.begin(), active.end(), [](std::uint8_t v) { return v != 0; });
  };

  while (any_active() && round < cap) {
    ++round;
    if (3 * round > stack.k_star()) {
      std::ostringstream msg;
      msg << "sohlob_rank: subsample stack exhausted at round " << round << " (k_star "
          << stack.k_star() << ", " << partition.size() << " sets)";
      throw std::runtime_error(msg.str());
    }
    const Matrix& y_env = stack.means(3 * round - 3);
    const Matrix& y_scan = stack.means(3 * round - 2);
    const Matrix& y_update = stack.means(3 * round - 1);

    RoundDiag rd;
    RoundTrace rt;
    if (trace) {
      rt.partition = partition;
      rt.active = active;
    }

    std::vector<std::vector<std::int32_t>> next_partition;
    std::vector<std::uint8_t> next_active;
    auto push = [&](std::vector<std::int32_t> block, bool is_active) {
      if (block.empty()) return;
      next_partition.push_back(std::move(block));
      next_active.push_back(is_active ? 1 : 0);
    };

    for (int t = 0; t < static_cast<int>(partition.size()); ++t) {
      const std::vector<std::int32_t>& e = partition[t];
      if (!active[t]) {
        push(e, false);
        continue;
      }
      RoundSetDiag sd;
      sd.set_index = t;
      sd.e_size = static_cast<int>(e.size());
      const std::int64_t edges_before = est.diag.edges_total;

      bool refinable = false;
      for (int l = 0; l < m; ++l) {
        std::vector<std::int32_t> q =
            envelope(t, partition, active, y_env, spec[l].p, spec[l].h, c);
        sd.q_sizes.push_back(static_cast<int>(q.size()));
        if (trace) rt.envelopes.push_back({t, l, q});
        if (c.gate(static_cast<std::int64_t>(q.size()), spec[l].h)) {
          refinable = true;
          scan_and_update(y_scan, y_update, e, q, est.graph, c, &est.diag);
        }
      }

      if (!refinable) {
        push(e, false);
      } else {
        Trisection tri = graph_trisect(e, est.graph);
        sd.refined = true;
        sd.o_size = static_cast<int>(tri.o.size());
        sd.p_size = static_cast<int>(tri.p.size());
        sd.i_size = static_cast<int>(tri.i.size());
        if (trace) rt.trisections.push_back({e, tri.o, tri.p, tri.i});
        const bool o_active = c.gate(static_cast<std::int64_t>(tri.o.size()), h_gate);
        const bool i_active = c.gate(static_cast<std::int64_t>(tri.i.size()), h_gate);
        push(std::move(tri.o), o_active);
        push(std::move(tri.p), false);  // undecided rows are never refined again
        push(std::move(tri.i), i_active);
      }
      sd.edges_added = est.diag.edges_total - edges_before;
      rd.sets.push_back(std::move(sd));
    }

    partition = std::move(next_partition);
    active = std::move(next_active);
    est.diag.rounds.push_back(std::move(rd));
    if (trace) trace->rounds.push_back(std::move(rt));
  }

  est.diag.cap_hit = any_active();
  est.rounds = round;
  est.final_partition = partition;
  est.pi_hat = compatible_permutation(partition, n);
  return est;
}

RankPairResult rank_pair(const ObservationSet& obs, const ThresholdSpec& spec, RankPolicy policy,
                         const RankConfig& config, RngStream& rng) {
  validate_spec(spec);
  const int n = obs.n, d = obs.d;
  if (n < 1 || d < 1) throw std::invalid_argument("rank_pair: empty observation set");

  ThresholdSpec row_spec, col_spec;
  double delta_tune;
  if (policy == RankPolicy::kSplitShift) {
    if (spec.size() != 1)
      throw std::invalid_argument("rank_pair: split-shift policy needs a single (p, h)");
    const double p = spec[0].p, h = spec[0].h;
    row_spec = {{p - h / 2.0, h / 2.0}};
    col_spec = {{p + h / 2.0, h / 2.0}};
    delta_tune = config.delta / 2.0;
  } else {
    row_spec = spec;
    col_spec = spec;
    delta_tune = config.delta / static_cast<double>(spec.size());
  }

  const int k_star = config.k_star_override > 0 ? config.k_star_override : default_k_star(n, d);
  RngStream sub_rng = rng.child(0);
  const SubsampleStack stack = subsample(obs, n, d, obs.lambda0, k_star, sub_rng);

  RankPairResult out;
  const AlgoConstants row_c =
      AlgoConstants::make(n, d, config.sigma, obs.lambda0, delta_tune, config.scale);
  out.row = sohlob_rank(stack, row_spec, row_c);

  const AlgoConstants col_c =
      AlgoConstants::make(d, n, config.sigma, obs.lambda0, delta_tune, config.scale);
  out.col = sohlob_rank(stack.transposed(), col_spec, col_c);
  return out;
}

ThresholdSpec default_threshold_grid(int n, int d) {
  const std::int64_t nd = static_cast<std::int64_t>(n) * d;
  const int depth = std::max(1, ceil_log2(nd));
  ThresholdSpec spec;
  spec.reserve(static_cast<std::size_t>(nd) * depth);
  for (std::int64_t k = 1; k <= nd; ++k) {
    const double p = static_cast<double>(k) / static_cast<double>(nd);
    double h = 0.5;
    for (int s = 0; s < depth; ++s) {
      spec.push_back({p, h});
      h /= 2.0;
    }
  }
  return spec;
}

std::string dump_diagnostics(const RankEstimate& est) {
  std::ostringstream os;
  os << "rounds " << est.rounds << " edges " << est.diag.edges_total << " update_calls "
     << est.diag.update_calls << " antisym_conflicts " << est.diag.antisym_conflicts
     << (est.diag.cap_hit ? " CAP_HIT" : "") << "\n";
  for (std::size_t r = 0; r < est.diag.rounds.size(); ++r) {
    for (const RoundSetDiag& sd : est.diag.rounds[r].sets) {
      os << "round " << r + 1 << " set " << sd.set_index << " |E| " << sd.e_size << " |Q|";
      for (int q : sd.q_sizes) os << ' ' << q;
      if (sd.refined)
        os << " trisect " << sd.o_size << '/' << sd.p_size << '/' << sd.i_size;
      else
        os << " retired";
      os << " edges+" << sd.edges_added << "\n";
    }
  }
  return os.str();
}

}  // namespace biso
