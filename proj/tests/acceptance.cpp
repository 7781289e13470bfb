// Acceptance suite: one pass/fail line per criterion. Run with a criterion
// number (1..10) or no argument for the full list.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "biso/classify.hpp"
#include "biso/harness.hpp"
#include "biso/losses.hpp"
#include "biso/sohlob.hpp"
#include "testutil.hpp"

using namespace biso;

namespace {

// Scales for the stochastic regression criteria. The theory constants
// (scale 1) gate refinement off at these sizes, so the stochastic checks run
// at the calibrated scales recorded here; see the README for the sweep that
// produced them.
constexpr double kNoiselessScale = 0.009;
constexpr double kRateScale = 0.004;
constexpr double kPipelineScale = 0.02;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

bool g_all_ok = true;

void report(int criterion, bool ok, const std::string& name, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) g_all_ok = false;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// 1. losses agree exactly with naive cell-by-cell recomputation
void criterion_1() {
  Timer timer;
  RngStream root(101);
  std::int64_t mismatches = 0;
  const int cases = 2000;
  for (int s = 0; s < cases; ++s) {
    RngStream r = root.child(s);
    const BisoInstance inst = testutil::random_instance(r, 5, 5);
    RngStream pr = r.child(1);
    const Permutation pi = Permutation::random(inst.n(), pr);
    const Permutation eta = Permutation::random(inst.d(), pr);
    const double p = pr.next_unit();
    const double h = 0.4 * pr.next_unit();
    if (loss_lph(inst, pi, eta, p, h) != testutil::naive_loss_lph(inst, pi, eta, p, h))
      ++mismatches;
    if (loss_rph(inst, pi, p, h) != testutil::naive_loss_rph(inst, pi, p, h)) ++mismatches;
    if (loss_cph(inst, eta, p, h) != testutil::naive_loss_cph(inst, eta, p, h)) ++mismatches;
    const ClassificationMatrix truth = oracle_level_set(inst, p, h);
    ClassificationMatrix est = truth;
    for (std::size_t idx = 0; idx < est.cells.size(); ++idx)
      if (pr.next_unit() < 0.3)
        est.cells[idx] = static_cast<Cell>(pr.next_below(3));
    if (loss_l01na(truth, est) != testutil::naive_loss_l01na(truth, est)) ++mismatches;
  }
  const double sec = timer.seconds();
  report(1, mismatches == 0 && sec < 5.0, "loss oracle equivalence",
         fmt("%d cases, %lld mismatches, %.2fs", cases, (long long)mismatches, sec));
}

// 2. both halves of the loss bound lemma
void criterion_2() {
  RngStream root(202);
  std::int64_t violations = 0;
  const int cases = 1000;
  for (int s = 0; s < cases; ++s) {
    RngStream r = root.child(s);
    const BisoInstance inst = testutil::random_instance(r, 8, 8);
    RngStream pr = r.child(1);
    const Permutation pi = Permutation::random(inst.n(), pr);
    const Permutation eta = Permutation::random(inst.d(), pr);
    const double p = 0.25 + 0.5 * pr.next_unit();
    const double h = 0.02 + 0.2 * pr.next_unit();
    if (loss_lph(inst, pi, eta, p, h) <
        std::max(loss_rph(inst, pi, p, h), loss_cph(inst, eta, p, h)))
      ++violations;
    const std::int64_t bound =
        2 * std::min(loss_rph(inst, pi, p - h, h) + loss_cph(inst, eta, p + h, h),
                     loss_cph(inst, eta, p - h, h) + loss_rph(inst, pi, p + h, h));
    if (loss_lph(inst, pi, eta, p, 2 * h) > bound) ++violations;
  }
  report(2, violations == 0, "loss bound lemma",
         fmt("%d cases, %lld violations", cases, (long long)violations));
}

// 3. kendall identity, exhaustive and randomized
void criterion_3() {
  std::int64_t failures = 0;

  RngStream strict_rng(303);
  const double h6 = 0.2;
  const BisoInstance strict = gen_noisy_sorting(6, h6, false, strict_rng);
  std::vector<std::int32_t> mapping{0, 1, 2, 3, 4, 5};
  int perms = 0;
  do {
    ++perms;
    const Permutation prime = Permutation::from_mapping(mapping);
    if (level_confusions(strict.m, strict.row_perm, strict.row_perm, prime, prime, 0.5, h6) !=
        2 * kendall_tau(prime, strict.row_perm))
      ++failures;
  } while (std::next_permutation(mapping.begin(), mapping.end()));

  RngStream gen_rng(304);
  const double h64 = 0.1;
  const BisoInstance general = gen_noisy_sorting(64, h64, true, gen_rng);
  for (int s = 0; s < 1000; ++s) {
    RngStream pr = gen_rng.child(s);
    const Permutation prime = Permutation::random(64, pr);
    if (level_confusions(general.m, general.row_perm, general.row_perm, prime, prime, 0.5, h64) !=
        2 * kendall_tau(prime, general.row_perm))
      ++failures;
  }
  report(3, failures == 0 && perms == 720, "kendall identity",
         fmt("720 exhaustive + 1000 random, %lld failures", (long long)failures));
}

// 4. frobenius dominations: confusion count and plug-in classification
void criterion_4() {
  RngStream root(404);
  std::int64_t violations = 0;
  const int cases = 500;
  for (int s = 0; s < cases; ++s) {
    RngStream r = root.child(s);
    const int n = 2 + static_cast<int>(r.next_below(10));
    const int d = 2 + static_cast<int>(r.next_below(10));
    RngStream g1 = r.child(1), g2 = r.child(2), pr = r.child(3);
    const BisoInstance inst = gen_random_biso(n, d, g1);
    const Permutation pi = Permutation::random(n, pr);
    const Permutation eta = Permutation::random(d, pr);
    const double p = 0.3 + 0.4 * pr.next_unit();
    const double h = 0.02 + 0.13 * pr.next_unit();

    const double lph = static_cast<double>(loss_lph(inst, pi, eta, p, h));
    if (lph * (2 * h) * (2 * h) > loss_frobenius_perm(inst, pi, eta) + 1e-9) ++violations;

    // plug-in bound against an independent smooth estimate of the matrix
    const BisoInstance other = gen_random_biso(n, d, g2);
    double frob = 0.0;
    ClassificationMatrix plug(n, d, p, h);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) {
        const double diff = other.m(i, j) - inst.m(i, j);
        frob += diff * diff;
        plug.at(i, j) = other.m(i, j) >= p ? Cell::kOne : Cell::kZero;
      }
    const double l01 = static_cast<double>(loss_l01na(oracle_level_set(inst, p, h), plug));
    if (l01 > frob / (4 * h * h) + 1e-9) ++violations;
  }
  report(4, violations == 0, "frobenius domination",
         fmt("%d cases, %lld violations", cases, (long long)violations));
}

// 5. structural soundness at the theory constants
void criterion_5() {
  Timer timer;
  const int runs = 200, n = 32, d = 32;
  const double delta = 0.1, h = 0.25, p = 0.5;
  int partition_bad = 0, rounds_bad = 0, envelope_budget_bad = 0;
  int wrong_edge_runs = 0, envelope_miss_runs = 0, inversion_runs = 0, shrink_bad = 0;
  RngStream root(505);
  for (int s = 0; s < runs; ++s) {
    RngStream r = root.child(s);
    RngStream pr = r.child(0);
    const Permutation pi = Permutation::random(n, pr);
    const Permutation eta = Permutation::random(d, pr);
    RngStream cr = r.child(1);
    const BisoInstance inst = gen_two_value(n, d, p, h, pi, eta, staircase_random(n, d, cr));
    SamplingConfig scfg;
    scfg.lambda0 = 1.0;
    RngStream obs_rng = r.child(2);
    const ObservationSet obs = draw_observations(inst, scfg, obs_rng);
    RngStream sub_rng = r.child(3);
    const SubsampleStack stack = subsample(obs, n, d, 1.0, default_k_star(n, d), sub_rng);
    const AlgoConstants c = AlgoConstants::make(n, d, 1.0, 1.0, delta, 1.0);
    RunTrace trace;
    const RankEstimate est = sohlob_rank(stack, {{p, h}}, c, &trace);

    if (est.rounds > ceil_log2(n)) ++rounds_bad;

    bool wrong_edge = false;
    for (int i = 0; i < n && !wrong_edge; ++i)
      for (int j = 0; j < n; ++j)
        if (est.graph.get(i, j) && pi(i) > pi(j)) {
          wrong_edge = true;
          break;
        }
    if (wrong_edge) ++wrong_edge_runs;

    bool envelope_miss = false, inversion = false;
    for (std::size_t k = 0; k < trace.rounds.size(); ++k) {
      const RoundTrace& rt = trace.rounds[k];
      // partition of [n] at every round
      std::set<std::int32_t> seen;
      std::size_t total = 0;
      for (const auto& block : rt.partition) {
        total += block.size();
        seen.insert(block.begin(), block.end());
      }
      if (total != static_cast<std::size_t>(n) || seen.size() != static_cast<std::size_t>(n))
        ++partition_bad;

      std::int64_t q_total = 0;
      for (const EnvelopeRecord& rec : rt.envelopes) {
        q_total += static_cast<std::int64_t>(rec.q.size());
        const std::vector<std::int32_t> oracle =
            testutil::oracle_questions(inst, rt.partition[rec.set_index], p, h);
        if (!std::includes(rec.q.begin(), rec.q.end(), oracle.begin(), oracle.end()))
          envelope_miss = true;
      }
      if (q_total > 3 * d) ++envelope_budget_bad;

      for (const TrisectRecord& tr : trace.rounds[k].trisections) {
        for (std::int32_t io : tr.o)
          for (std::int32_t ii : tr.i)
            if (pi(io) > pi(ii)) inversion = true;
        const double cap = std::pow(0.5, static_cast<double>(k + 1)) * n;
        if (static_cast<double>(tr.o.size()) > cap || static_cast<double>(tr.i.size()) > cap)
          ++shrink_bad;
      }
    }
    if (envelope_miss) ++envelope_miss_runs;
    if (inversion) ++inversion_runs;
  }
  const double slack = delta * runs + 3.0 * std::sqrt(delta * (1 - delta) * runs);
  const double sec = timer.seconds();
  const bool ok = partition_bad == 0 && rounds_bad == 0 && envelope_budget_bad == 0 &&
                  wrong_edge_runs <= slack && envelope_miss_runs <= slack &&
                  inversion_runs <= slack && shrink_bad == 0 && sec < 60.0;
  report(5, ok, "structural soundness at theory constants",
         fmt("%d runs: partition %d, rounds %d, Q-budget %d, wrong-edge %d, env-miss %d, "
             "inversion %d, shrink %d, slack %.1f, %.1fs",
             runs, partition_bad, rounds_bad, envelope_budget_bad, wrong_edge_runs,
             envelope_miss_runs, inversion_runs, shrink_bad, slack, sec));
}

// 6. noiseless exact recovery on a blocked staircase
void criterion_6() {
  Timer timer;
  const int n = 64, d = 64, seeds = 50;
  // Values {0, 2h}: the lower block contributes no observation noise at all,
  // so subsample missingness cannot fabricate edges against it. The unequal
  // 31/33 block split keeps the strict majority bar reachable only by the
  // upper block, which makes the single trisection structurally stable.
  const double h = 0.3, p = 0.3;
  const int hi_rows = n / 2 - 1;
  const int hi_cols = 2 * d / 3;
  std::vector<int> cut(d, 0);
  for (int j = 0; j < hi_cols; ++j) cut[j] = hi_rows;
  const double lambda0 = std::log(static_cast<double>(n) * d);
  int exact = 0;
  RngStream root(606);
  for (int s = 0; s < seeds; ++s) {
    RngStream r = root.child(s);
    RngStream pr = r.child(0);
    const Permutation pi = Permutation::random(n, pr);
    const Permutation eta = Permutation::random(d, pr);
    const BisoInstance inst = gen_two_value(n, d, p, h, pi, eta, cut);
    SamplingConfig scfg;
    scfg.lambda0 = lambda0;
    scfg.sigma = 0.0;
    RngStream obs_rng = r.child(1);
    const ObservationSet obs = draw_observations(inst, scfg, obs_rng);
    RankConfig rcfg;
    rcfg.sigma = 0.0;
    rcfg.delta = 0.1;
    rcfg.scale = kNoiselessScale;
    RngStream rank_rng = r.child(2);
    const RankPairResult est = rank_pair(obs, {{p, h}}, RankPolicy::kSplitShift, rcfg, rank_rng);
    if (loss_rph(inst, est.row.pi_hat, p, h) == 0) ++exact;
  }
  report(6, exact >= 48, "noiseless exact recovery",
         fmt("R_ph = 0 in %d/%d seeds at scale %g, %.1fs", exact, seeds, kNoiselessScale,
             timer.seconds()));
}

// 7. loss rate in the tolerance
void criterion_7() {
  Timer timer;
  ExperimentConfig cfg;
  cfg.gen.model = ModelTag::kTwoValue;
  cfg.gen.staircase = StaircaseKind::kDiagonal;
  cfg.ns = {256};
  cfg.ds = {256};
  cfg.lambda0s = {1.0};
  cfg.hs = {0.1, 0.15, 0.2, 0.3, 0.4};
  cfg.sigmas = {0.5};
  cfg.scales = {kRateScale};
  cfg.p = 0.5;
  cfg.replicates = 20;
  cfg.seed = 707;
  cfg.mode = RunMode::kRankOnly;
  cfg.jobs = 2;
  const std::vector<ResultRow> rows = run_experiment(cfg);
  const RateFit fit = rate_fit(rows, "h", "L_ph");
  double mean_at_04 = 0;
  int count_at_04 = 0;
  for (const ResultRow& r : rows)
    if (r.h == 0.4) {
      mean_at_04 += r.l_ph;
      ++count_at_04;
    }
  mean_at_04 /= count_at_04;
  const double nd = 256.0 * 256.0;
  const double sec = timer.seconds();
  const bool ok =
      fit.slope >= -2.6 && fit.slope <= -1.4 && mean_at_04 < nd / 4.0 && sec < 600.0;
  report(7, ok, "loss rate in h",
         fmt("slope %.2f (r2 %.2f), mean L at h=0.4: %.0f vs nd/4=%.0f, scale %g, %.0fs",
             fit.slope, fit.r2, mean_at_04, nd / 4.0, kRateScale, sec));
}

// 8. classification pipeline sanity
void criterion_8() {
  Timer timer;
  // (a) mean classification loss non-increasing in the sampling effort
  ExperimentConfig cfg;
  cfg.gen.model = ModelTag::kTwoValue;
  cfg.gen.staircase = StaircaseKind::kDiagonal;
  cfg.ns = {128};
  cfg.ds = {128};
  cfg.lambda0s = {0.5, 1.0, 2.0, 4.0};
  cfg.hs = {0.3};
  cfg.sigmas = {0.5};
  cfg.scales = {kPipelineScale};
  cfg.p = 0.5;
  cfg.replicates = 20;
  cfg.seed = 808;
  cfg.mode = RunMode::kClassifyPipeline;
  cfg.jobs = 2;
  const std::vector<ResultRow> rows = run_experiment(cfg);
  std::vector<double> means, ses;
  for (double lambda0 : cfg.lambda0s) {
    double sum = 0, sum2 = 0;
    int count = 0;
    for (const ResultRow& r : rows)
      if (r.lambda0 == lambda0) {
        sum += r.l01na;
        sum2 += r.l01na * r.l01na;
        ++count;
      }
    const double mean = sum / count;
    means.push_back(mean);
    ses.push_back(std::sqrt(std::max(0.0, sum2 / count - mean * mean) / count));
  }
  int violations = 0;
  bool violation_within_se = true;
  for (std::size_t k = 0; k + 1 < means.size(); ++k) {
    if (means[k + 1] > means[k]) {
      ++violations;
      if (means[k + 1] - means[k] > std::sqrt(ses[k] * ses[k] + ses[k + 1] * ses[k + 1]))
        violation_within_se = false;
    }
  }

  // (b) exact-permutation, unit-block, noiseless configuration is lossless
  const int n = 8, d = 8;
  const double h = 0.4, p = 0.5;
  RngStream r(809);
  RngStream pr = r.child(0);
  const Permutation pi = Permutation::random(n, pr);
  const Permutation eta = Permutation::random(d, pr);
  const BisoInstance inst = gen_two_value(n, d, p, h, pi, eta, staircase_diagonal(n, d));
  const double lambda0 =
      2.0 * 512.0 * std::log(static_cast<double>(n) * d) / (h * h);  // forces unit windows
  const BlockGrid grid = block_grid(n, d, 0.0, lambda0, h);
  SamplingConfig scfg;
  scfg.lambda0 = lambda0;
  scfg.sigma = 0.0;
  RngStream obs_rng = r.child(1);
  const ObservationSet obs = draw_observations(inst, scfg, obs_rng);
  std::int64_t zero_loss = -1;
  if (!grid.degenerate && grid.k_h == 1 && grid.l_h == 1) {
    const Matrix avg = block_average(obs, pi, eta, grid);
    zero_loss = loss_l01na(oracle_level_set(inst, p, h), classify_plugin(avg, p, h, pi, eta));
  }
  const bool ok = (violations <= 1) && violation_within_se && zero_loss == 0;
  std::string chain;
  for (double m : means) chain += fmt("%.0f ", m);
  report(8, ok, "classification pipeline sanity",
         fmt("mean L01NA by lambda0: %s; %d adjacent increases; exact config loss %lld; %.0fs",
             chain.c_str(), violations, (long long)zero_loss, timer.seconds()));
}

// 9. distributional checks on the sampling layer
void criterion_9() {
  const int n = 8, d = 8, seeds = 2000;
  const double lambda0 = 1.0;
  RngStream gen_rng(909);
  const BisoInstance inst = gen_random_biso(n, d, gen_rng);
  const int k_star = default_k_star(n, d);
  std::vector<std::int64_t> totals, cell_counts;
  std::int64_t observed_cells = 0, total_cells = 0;
  SamplingConfig scfg;
  scfg.lambda0 = lambda0;
  RngStream root(910);
  for (int s = 0; s < seeds; ++s) {
    RngStream obs_rng = root.child(2 * s);
    const ObservationSet obs = draw_observations(inst, scfg, obs_rng);
    totals.push_back(obs.count());
    RngStream sub_rng = root.child(2 * s + 1);
    const SubsampleStack stack = subsample(obs, n, d, lambda0, k_star, sub_rng);
    cell_counts.push_back(stack.count(0, 0, 0));
    if (s < 20) {  // ~11.5k cells for the lambda1 frequency check
      for (int k = 0; k < k_star; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < d; ++j) {
            ++total_cells;
            if (stack.count(k, i, j) > 0) ++observed_cells;
          }
    }
  }
  const double p_total = testutil::poisson_gof_pvalue(totals, lambda0 * n * d);
  const double lambda0_minus = lambda0 / k_star;
  const double p_cell = testutil::poisson_gof_pvalue(cell_counts, lambda0_minus);
  const double lambda1 = 1.0 - std::exp(-lambda0_minus);
  const double freq = static_cast<double>(observed_cells) / total_cells;
  const bool ok = p_total > 0.01 && p_cell > 0.01 && std::fabs(freq - lambda1) < 0.01;
  report(9, ok, "sampling distributions",
         fmt("chi2 p: N'=%.3f, N^k=%.3f; P(N>0)=%.4f vs lambda1=%.4f", p_total, p_cell, freq,
             lambda1));
}

// 10. full ranking pass within the time budget
void criterion_10() {
  const int n = 512, d = 512;
  RngStream r(1010);
  RngStream pr = r.child(0);
  const Permutation pi = Permutation::random(n, pr);
  const Permutation eta = Permutation::random(d, pr);
  const BisoInstance inst =
      gen_two_value(n, d, 0.5, 0.2, pi, eta, staircase_diagonal(n, d));
  SamplingConfig scfg;
  scfg.lambda0 = 1.0;
  scfg.sigma = 0.5;
  RngStream obs_rng = r.child(1);
  const ObservationSet obs = draw_observations(inst, scfg, obs_rng);
  RankConfig rcfg;
  rcfg.sigma = 0.5;
  rcfg.delta = 0.1;
  rcfg.scale = kRateScale;  // refinement actually runs at this scale
  RngStream rank_rng = r.child(2);
  Timer timer;
  const RankPairResult est = rank_pair(obs, {{0.5, 0.2}}, RankPolicy::kSplitShift, rcfg, rank_rng);
  const double sec = timer.seconds();
  const std::int64_t loss = loss_lph(inst, est.row.pi_hat, est.col.pi_hat, 0.5, 0.2);
  report(10, sec < 30.0, "single-threaded rank_pair at n=d=512",
         fmt("%.1fs, rounds %d/%d, L_ph %lld", sec, est.row.rounds, est.col.rounds,
             (long long)loss));
}

}  // namespace

int main(int argc, char** argv) {
  const int which = argc > 1 ? std::atoi(argv[1]) : 0;
  using Fn = void (*)();
  const Fn criteria[] = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                         criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
  if (which < 0 || which > 10) {
    std::fprintf(stderr, "usage: %s [1..10]\n", argv[0]);
    return 2;
  }
  if (which == 0) {
    for (Fn fn : criteria) fn();
  } else {
    criteria[which - 1]();
  }
  return g_all_ok ? 0 : 1;
}
