#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "biso/matrix.hpp"
#include "biso/permutation.hpp"
#include "biso/sampling.hpp"

namespace biso {

// Tuning constants of the sorting procedure. rho is the deviation radius of
// partial sums, gamma the minimum question-set size for a graph update.
// `scale` multiplies both; 1 keeps the theory-exact values, which at desk
// sizes usually gate every refinement off (the run then returns the trivial
// partition). Experiments that need refinement document their scale.
struct AlgoConstants {
  int n = 0;
  int d = 0;
  double sigma = 1.0;
  double lambda0 = 1.0;
  double delta = 0.1;
  double scale = 1.0;
  int k_star = 0;
  double lambda0_minus = 0.0;
  double lambda1 = 0.0;
  double rho = 0.0;
  double gamma = 0.0;

  static AlgoConstants make(int n, int d, double sigma, double lambda0, double delta,
                            double scale = 1.0);

  // Refinement gate: a set (or question set) of this size carries enough
  // observations to compare entries at tolerance h.
  bool gate(std::int64_t size, double h) const {
    return lambda1 * static_cast<double>(size) > 4.0 * rho * rho / (h * h);
  }
};

struct ThresholdPair {
  double p = 0.5;
  double h = 0.1;
};

using ThresholdSpec = std::vector<ThresholdPair>;

void validate_spec(const ThresholdSpec& spec);

// Mutable state of one sorting run: ordered partition of the rows, activity
// flags, and the comparison graph.
struct SortingState {
  std::vector<std::vector<std::int32_t>> partition;
  std::vector<std::uint8_t> active;
  BitMatrix graph;
  int round = 0;
};

struct RoundSetDiag {
  int set_index = 0;
  int e_size = 0;
  std::vector<int> q_sizes;       // one entry per threshold
  int o_size = 0, p_size = 0, i_size = 0;
  std::int64_t edges_added = 0;
  bool refined = false;
};

struct RoundDiag {
  std::vector<RoundSetDiag> sets;
};

struct RankDiagnostics {
  std::vector<RoundDiag> rounds;
  std::int64_t update_calls = 0;       // logical UpdateGraph invocations
  std::int64_t edges_total = 0;
  std::int64_t antisym_conflicts = 0;  // both (i,i') and (i',i) ended up set
  bool cap_hit = false;                // still-active sets at the round cap
};

// Optional per-round capture for audits; records exact sets, envelopes and
// trisections. Only enabled by tests, costs memory proportional to the run.
struct TrisectRecord {
  std::vector<std::int32_t> e, o, p, i;
};

struct EnvelopeRecord {
  int set_index = 0;
  int threshold_index = 0;
  std::vector<std::int32_t> q;
};

struct RoundTrace {
  std::vector<std::vector<std::int32_t>> partition;
  std::vector<std::uint8_t> active;
  std::vector<EnvelopeRecord> envelopes;
  std::vector<TrisectRecord> trisections;
};

struct RunTrace {
  std::vector<RoundTrace> rounds;
};

struct RankEstimate {
  Permutation pi_hat;
  std::vector<std::vector<std::int32_t>> final_partition;
  int rounds = 0;
  RankDiagnostics diag;
  BitMatrix graph;
};

// Question envelope for active set s: columns whose partial means over the
// nearest active neighbours bracket the threshold band. Both brackets
// default to [d] when s has no active neighbour on that side.
std::vector<std::int32_t> envelope(int s, const std::vector<std::vector<std::int32_t>>& partition,
                                   const std::vector<std::uint8_t>& active, const Matrix& ytilde,
                                   double p, double h, const AlgoConstants& c);

struct GraphUpdateStats {
  std::int64_t edges_added = 0;
  std::int64_t antisym_conflicts = 0;
};

// Adds edge i -> i' whenever the partial row means over qprime differ by
// more than 2*rho*sqrt(lambda1/|qprime|); no-op when |qprime| <= gamma.
// `literal_pairs` forces the reference O(|E|^2) double loop.
void update_graph(BitMatrix& graph, const std::vector<std::int32_t>& e,
                  const std::vector<std::int32_t>& qprime, const Matrix& yb,
                  const AlgoConstants& c, GraphUpdateStats* stats = nullptr,
                  bool literal_pairs = false);

// For every question j in q, builds the in-between band and the nested
// left/right margin bands of questions (by partial column means of ya over
// e), and runs update_graph with yb on each.
void scan_and_update(const Matrix& ya, const Matrix& yb, const std::vector<std::int32_t>& e,
                     const std::vector<std::int32_t>& q, BitMatrix& graph,
                     const AlgoConstants& c, RankDiagnostics* diag = nullptr);

// Majority-vote trisection of e by the comparison graph; rows contradictorily
// claimed by both sides stay undecided so (o, p, i) always partitions e.
struct Trisection {
  std::vector<std::int32_t> o, p, i;
};
Trisection graph_trisect(const std::vector<std::int32_t>& e, const BitMatrix& graph);

// Full hierarchical sorting run over the row dimension of the stack.
RankEstimate sohlob_rank(const SubsampleStack& stack, const ThresholdSpec& spec,
                         const AlgoConstants& c, RunTrace* trace = nullptr);

enum class RankPolicy {
  kSharedSpec,   // both passes use `spec` as given
  kSplitShift,   // single (p,h): rows at (p-h/2, h/2), columns at (p+h/2, h/2)
};

struct RankConfig {
  double sigma = 1.0;
  double delta = 0.1;
  double scale = 1.0;
  int k_star_override = 0;  // 0 = default_k_star(n, d)
};

struct RankPairResult {
  RankEstimate row;
  RankEstimate col;
};

// Ranks rows, then columns of the transposed stack built from the same
// observations. The tuning delta is split across passes/thresholds.
RankPairResult rank_pair(const ObservationSet& obs, const ThresholdSpec& spec, RankPolicy policy,
                         const RankConfig& config, RngStream& rng);

// Regular threshold grid of width 1/(nd) with dyadic tolerances
// 1/2, ..., 1/2^ceil(log2(nd)) each.
ThresholdSpec default_threshold_grid(int n, int d);

std::string dump_diagnostics(const RankEstimate& est);

}  // namespace biso
