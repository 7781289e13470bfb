#include "biso/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "biso/classify.hpp"
#include "biso/losses.hpp"

namespace biso {

std::string mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::kRankOnly: return "rank";
    case RunMode::kClassifyPipeline: return "classify";
    case RunMode::kLossAudit: return "audit";
  }
  throw std::logic_error("mode_name: bad mode");
}

RunMode mode_from_name(const std::string& name) {
  if (name == "rank") return RunMode::kRankOnly;
  if (name == "classify") return RunMode::kClassifyPipeline;
  if (name == "audit") return RunMode::kLossAudit;
  throw std::invalid_argument("unknown mode: " + name);
}

void ExperimentConfig::validate() const {
  if (replicates < 1) throw std::invalid_argument("config: reps must be >= 1");
  if (ns.empty() || ds.empty() || lambda0s.empty() || hs.empty() || sigmas.empty() ||
      scales.empty())
    throw std::invalid_argument("config: empty grid");
  for (double h : hs)
    if (h <= 0.0) throw std::invalid_argument("config: h must be > 0");
  for (int n : ns)
    if (n < 1) throw std::invalid_argument("config: n must be >= 1");
  for (int d : ds)
    if (d < 1) throw std::invalid_argument("config: d must be >= 1");
  for (double l : lambda0s)
    if (l <= 0.0) throw std::invalid_argument("config: lambda0 must be > 0");
  if (jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
}

BisoInstance make_instance(const GeneratorSpec& gen, int n, int d, double p, double h,
                           RngStream& rng, double sigma, double lambda0) {
  switch (gen.model) {
    case ModelTag::kTwoValue: {
      RngStream perm_rng = rng.child(0);
      const Permutation rp = Permutation::random(n, perm_rng);
      const Permutation cp = Permutation::random(d, perm_rng);
      std::vector<int> cut;
      switch (gen.staircase) {
        case StaircaseKind::kDiagonal: cut = staircase_diagonal(n, d); break;
        case StaircaseKind::kGroups: cut = staircase_groups(n, d, gen.groups); break;
        case StaircaseKind::kMedianNested:
          cut = staircase_median_nested(n, d, gen.groups);
          break;
        case StaircaseKind::kRandom: {
          RngStream cut_rng = rng.child(1);
          cut = staircase_random(n, d, cut_rng);
          break;
        }
      }
      return gen_two_value(n, d, p, h, rp, cp, cut);
    }
    case ModelTag::kNoisySorting:
    case ModelTag::kNoisySortingGeneral: {
      if (n != d) throw std::invalid_argument("noisy sorting needs n == d");
      return gen_noisy_sorting(n, h, gen.model == ModelTag::kNoisySortingGeneral, rng);
    }
    case ModelTag::kPacking: {
      if (n % 2 != 0) throw std::invalid_argument("packing needs even n");
      // random balanced flag vector
      std::vector<int> v(n, 0);
      std::fill(v.begin(), v.begin() + n / 2, 1);
      for (int i = n - 1; i > 0; --i) std::swap(v[i], v[rng.next_below(i + 1)]);
      const int l = packing_column_count(sigma, lambda0, h, d);
      return gen_packing(n, d, p, h, l, v);
    }
    case ModelTag::kMultiLevel: {
      std::vector<double> levels = gen.levels;
      if (levels.empty()) levels = {0.2, 0.4, 0.6, 0.8};
      return gen_multi_level(n, d, levels, rng);
    }
    case ModelTag::kRandomBiso: return gen_random_biso(n, d, rng);
  }
  throw std::logic_error("make_instance: bad model");
}

namespace {

ResultRow run_cell(const ExperimentConfig& cfg, int n, int d, double lambda0, double h,
                   double sigma, double scale, int rep, const RngStream& cell_rng) {
  const auto start = std::chrono::steady_clock::now();
  const double nan = std::nan("");

  ResultRow row;
  row.model = model_name(cfg.gen.model);
  row.n = n;
  row.d = d;
  row.lambda0 = lambda0;
  row.h = h;
  row.p = cfg.p;
  row.sigma = sigma;
  row.scale = scale;
  row.seed = cell_rng.key();
  row.rep = rep;
  row.l01na = nan;
  row.kendall = nan;

  RngStream gen_rng = cell_rng.child(0);
  const BisoInstance inst = make_instance(cfg.gen, n, d, cfg.p, h, gen_rng, sigma, lambda0);

  SamplingConfig sampling;
  sampling.lambda0 = lambda0;
  sampling.noise = cfg.noise;
  sampling.sigma = sigma;
  RngStream obs_rng = cell_rng.child(1);
  const ObservationSet obs = draw_observations(inst, sampling, obs_rng);

  const double sigma_eff = sampling.effective_sigma();
  RngStream est_rng = cell_rng.child(2);

  auto fill_rank_losses = [&](const Permutation& pi_hat, const Permutation& eta_hat) {
    row.l_ph = static_cast<double>(loss_lph(inst, pi_hat, eta_hat, cfg.p, h));
    row.r_ph = static_cast<double>(loss_rph(inst, pi_hat, cfg.p, h));
    row.c_ph = static_cast<double>(loss_cph(inst, eta_hat, cfg.p, h));
    row.frob = loss_frobenius_perm(inst, pi_hat, eta_hat);
    row.kendall = static_cast<double>(kendall_tau(pi_hat, inst.row_perm));
  };

  switch (cfg.mode) {
    case RunMode::kRankOnly: {
      RankConfig rc;
      rc.sigma = sigma_eff;
      rc.delta = cfg.delta;
      rc.scale = scale;
      const RankPairResult est =
          rank_pair(obs, {{cfg.p, h}}, RankPolicy::kSplitShift, rc, est_rng);
      fill_rank_losses(est.row.pi_hat, est.col.pi_hat);
      row.rounds = std::max(est.row.rounds, est.col.rounds);
      break;
    }
    case RunMode::kClassifyPipeline: {
      ClassifyConfig cc;
      cc.sigma = sigma_eff;
      cc.scale = scale;
      const PipelineResult est = estimate_level_set(obs, cfg.p, h, cc, est_rng);
      fill_rank_losses(est.row_est.pi_hat, est.col_est.pi_hat);
      row.rounds = std::max(est.row_est.rounds, est.col_est.rounds);
      row.l01na = static_cast<double>(loss_l01na(oracle_level_set(inst, cfg.p, h), est.r_hat));
      break;
    }
    case RunMode::kLossAudit: {
      // losses of uninformed random estimates; a baseline for the estimators
      RngStream perm_rng = est_rng;
      const Permutation pi_hat = Permutation::random(n, perm_rng);
      const Permutation eta_hat = Permutation::random(d, perm_rng);
      fill_rank_losses(pi_hat, eta_hat);
      break;
    }
  }

  row.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
               .count();
  return row;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  struct Cell {
    int n, d, rep;
    double lambda0, h, sigma, scale;
  };
  std::vector<Cell> cells;
  for (int n : cfg.ns)
    for (int d : cfg.ds)
      for (double lambda0 : cfg.lambda0s)
        for (double h : cfg.hs)
          for (double sigma : cfg.sigmas)
            for (double scale : cfg.scales)
              for (int rep = 0; rep < cfg.replicates; ++rep)
                cells.push_back({n, d, rep, lambda0, h, sigma, scale});

  std::vector<ResultRow> rows(cells.size());
  const RngStream base(cfg.seed);
  auto work = [&](std::size_t idx) {
    const Cell& c = cells[idx];
    rows[idx] = run_cell(cfg, c.n, c.d, c.lambda0, c.h, c.sigma, c.scale, c.rep,
                         base.child(idx));
  };

  const int jobs = std::min<int>(cfg.jobs, static_cast<int>(cells.size()));
  if (jobs <= 1) {
    for (std::size_t idx = 0; idx < cells.size(); ++idx) work(idx);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t idx = next.fetch_add(1);
          if (idx >= cells.size()) return;
          work(idx);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  return rows;
}

const char* const kCsvHeader =
    "model,n,d,lambda0,h,p,sigma,scale,seed,rep,rounds,L_ph,R_ph,C_ph,L01NA,frob,kendall,ms";

namespace {

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
  os << kCsvHeader << "\n";
  for (const ResultRow& r : rows) {
    os << r.model << ',' << r.n << ',' << r.d << ',' << format_value(r.lambda0) << ','
       << format_value(r.h) << ',' << format_value(r.p) << ',' << format_value(r.sigma) << ','
       << format_value(r.scale) << ',' << r.seed << ',' << r.rep << ',' << r.rounds << ','
       << format_value(r.l_ph) << ',' << format_value(r.r_ph) << ',' << format_value(r.c_ph)
       << ',' << format_value(r.l01na) << ',' << format_value(r.frob) << ','
       << format_value(r.kendall) << ',' << format_value(r.ms) << "\n";
  }
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  emit_csv(rows, os);
}

std::vector<ResultRow> parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader)
    throw std::runtime_error("result csv: unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 18) throw std::runtime_error("result csv: bad row: " + line);
    ResultRow r;
    int f = 0;
    r.model = fields[f++];
    r.n = std::stoi(fields[f++]);
    r.d = std::stoi(fields[f++]);
    r.lambda0 = std::stod(fields[f++]);
    r.h = std::stod(fields[f++]);
    r.p = std::stod(fields[f++]);
    r.sigma = std::stod(fields[f++]);
    r.scale = std::stod(fields[f++]);
    r.seed = std::stoull(fields[f++]);
    r.rep = std::stoi(fields[f++]);
    r.rounds = std::stoi(fields[f++]);
    r.l_ph = std::stod(fields[f++]);
    r.r_ph = std::stod(fields[f++]);
    r.c_ph = std::stod(fields[f++]);
    r.l01na = std::stod(fields[f++]);
    r.frob = std::stod(fields[f++]);
    r.kendall = std::stod(fields[f++]);
    r.ms = std::stod(fields[f++]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> parse_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return parse_csv(is);
}

namespace {

bool value_equal(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

}  // namespace

bool rows_equal(const ResultRow& a, const ResultRow& b) {
  return a.model == b.model && a.n == b.n && a.d == b.d && value_equal(a.lambda0, b.lambda0) &&
         value_equal(a.h, b.h) && value_equal(a.p, b.p) && value_equal(a.sigma, b.sigma) &&
         value_equal(a.scale, b.scale) && a.seed == b.seed && a.rep == b.rep &&
         a.rounds == b.rounds && value_equal(a.l_ph, b.l_ph) && value_equal(a.r_ph, b.r_ph) &&
         value_equal(a.c_ph, b.c_ph) && value_equal(a.l01na, b.l01na) &&
         value_equal(a.frob, b.frob) && value_equal(a.kendall, b.kendall) &&
         value_equal(a.ms, b.ms);
}

namespace {

double row_field(const ResultRow& r, const std::string& name) {
  if (name == "n") return r.n;
  if (name == "d") return r.d;
  if (name == "lambda0") return r.lambda0;
  if (name == "h") return r.h;
  if (name == "p") return r.p;
  if (name == "sigma") return r.sigma;
  if (name == "scale") return r.scale;
  if (name == "rounds") return r.rounds;
  if (name == "L_ph") return r.l_ph;
  if (name == "R_ph") return r.r_ph;
  if (name == "C_ph") return r.c_ph;
  if (name == "L01NA") return r.l01na;
  if (name == "frob") return r.frob;
  if (name == "kendall") return r.kendall;
  if (name == "ms") return r.ms;
  throw std::invalid_argument("unknown column: " + name);
}

}  // namespace

RateFit rate_fit(const std::vector<ResultRow>& rows, const std::string& x_name,
                 const std::string& y_name) {
  // group rows by x, mean of y per group
  std::vector<double> xs;
  std::vector<double> sums, counts;
  for (const ResultRow& r : rows) {
    const double x = row_field(r, x_name);
    const double y = row_field(r, y_name);
    if (std::isnan(y)) continue;
    std::size_t g = 0;
    while (g < xs.size() && xs[g] != x) ++g;
    if (g == xs.size()) {
      xs.push_back(x);
      sums.push_back(0.0);
      counts.push_back(0.0);
    }
    sums[g] += y;
    counts[g] += 1.0;
  }
  if (xs.size() < 2) throw std::invalid_argument("rate_fit: need at least two x groups");

  std::vector<double> lx(xs.size()), ly(xs.size());
  for (std::size_t g = 0; g < xs.size(); ++g) {
    if (xs[g] <= 0.0) throw std::invalid_argument("rate_fit: x must be positive");
    const double mean = sums[g] / counts[g];
    if (mean <= 0.0) throw std::invalid_argument("rate_fit: mean y must be positive");
    lx[g] = std::log(xs[g]);
    ly[g] = std::log(mean);
  }
  const double k = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t g = 0; g < xs.size(); ++g) {
    mx += lx[g];
    my += ly[g];
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t g = 0; g < xs.size(); ++g) {
    sxx += (lx[g] - mx) * (lx[g] - mx);
    sxy += (lx[g] - mx) * (ly[g] - my);
    syy += (ly[g] - my) * (ly[g] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  cfg.ns.clear();
  cfg.ds.clear();
  cfg.lambda0s.clear();
  cfg.hs.clear();
  cfg.sigmas.clear();
  cfg.scales.clear();
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    std::string value;
    if (!(ss >> value))
      throw std::runtime_error("config line " + std::to_string(lineno) + ": missing value");
    if (key == "n") cfg.ns.push_back(std::stoi(value));
    else if (key == "d") cfg.ds.push_back(std::stoi(value));
    else if (key == "lambda0") cfg.lambda0s.push_back(std::stod(value));
    else if (key == "h") cfg.hs.push_back(std::stod(value));
    else if (key == "sigma") cfg.sigmas.push_back(std::stod(value));
    else if (key == "scale") cfg.scales.push_back(std::stod(value));
    else if (key == "p") cfg.p = std::stod(value);
    else if (key == "delta") cfg.delta = std::stod(value);
    else if (key == "reps") cfg.replicates = std::stoi(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "out") cfg.out = value;
    else if (key == "mode") cfg.mode = mode_from_name(value);
    else if (key == "model") cfg.gen.model = model_from_name(value);
    else if (key == "groups") cfg.gen.groups = std::stoi(value);
    else if (key == "levels") {
      // comma-separated list, e.g. "levels 0.2,0.4,0.8"
      cfg.gen.levels.clear();
      for (char& ch : value)
        if (ch == ',') ch = ' ';
      std::istringstream vs(value);
      double lvl;
      while (vs >> lvl) cfg.gen.levels.push_back(lvl);
    } else if (key == "staircase") {
      if (value == "random") cfg.gen.staircase = StaircaseKind::kRandom;
      else if (value == "diag") cfg.gen.staircase = StaircaseKind::kDiagonal;
      else if (value == "groups") cfg.gen.staircase = StaircaseKind::kGroups;
      else if (value == "nested") cfg.gen.staircase = StaircaseKind::kMedianNested;
      else throw std::runtime_error("config: unknown staircase: " + value);
    } else if (key == "noise") {
      if (value == "gaussian") cfg.noise = NoiseKind::kGaussian;
      else if (value == "bernoulli") cfg.noise = NoiseKind::kBernoulli;
      else throw std::runtime_error("config: unknown noise: " + value);
    } else if (key == "jobs") cfg.jobs = std::stoi(value);
    else throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key " + key);
  }
  if (cfg.ns.empty()) cfg.ns.push_back(64);
  if (cfg.ds.empty()) cfg.ds.push_back(64);
  if (cfg.lambda0s.empty()) cfg.lambda0s.push_back(1.0);
  if (cfg.hs.empty()) cfg.hs.push_back(0.2);
  if (cfg.sigmas.empty()) cfg.sigmas.push_back(1.0);
  if (cfg.scales.empty()) cfg.scales.push_back(1.0);
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  return parse_config(is);
}

}  // namespace biso
