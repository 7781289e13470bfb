#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "biso/model.hpp"
#include "biso/sampling.hpp"
#include "biso/sohlob.hpp"

namespace biso {

enum class RunMode { kRankOnly, kClassifyPipeline, kLossAudit };

std::string mode_name(RunMode mode);
RunMode mode_from_name(const std::string& name);

enum class StaircaseKind { kRandom, kDiagonal, kGroups, kMedianNested };

struct GeneratorSpec {
  ModelTag model = ModelTag::kTwoValue;
  StaircaseKind staircase = StaircaseKind::kRandom;
  int groups = 4;
  std::vector<double> levels;  // multi-level values; default filled on use
};

struct ExperimentConfig {
  GeneratorSpec gen;
  std::vector<int> ns{64};
  std::vector<int> ds{64};
  std::vector<double> lambda0s{1.0};
  std::vector<double> hs{0.2};
  std::vector<double> sigmas{1.0};
  std::vector<double> scales{1.0};
  double p = 0.5;
  double delta = 0.1;
  NoiseKind noise = NoiseKind::kGaussian;
  int replicates = 1;
  std::uint64_t seed = 1;
  std::string out;
  RunMode mode = RunMode::kRankOnly;
  int jobs = 1;

  void validate() const;
};

// One realized cell of the sweep. Count-valued losses are stored as doubles
// so unavailable fields can be NaN, but are always integral when present.
struct ResultRow {
  std::string model;
  int n = 0, d = 0;
  double lambda0 = 0, h = 0, p = 0, sigma = 0, scale = 0;
  std::uint64_t seed = 0;
  int rep = 0;
  int rounds = 0;
  double l_ph = 0, r_ph = 0, c_ph = 0, l01na = 0, frob = 0, kendall = 0;
  double ms = 0;
};

BisoInstance make_instance(const GeneratorSpec& gen, int n, int d, double p, double h,
                           RngStream& rng, double sigma = 1.0, double lambda0 = 1.0);

// Runs every grid point x replicate; rows come back in config order and are
// fully determined by the base seed.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

extern const char* const kCsvHeader;

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> parse_csv(std::istream& is);
std::vector<ResultRow> parse_csv_file(const std::string& path);
bool rows_equal(const ResultRow& a, const ResultRow& b);

struct RateFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

// Least-squares fit of log(mean y) against log(x) over rows grouped by the
// named x column ("h", "lambda0", "n", "d", "sigma", "scale").
RateFit rate_fit(const std::vector<ResultRow>& rows, const std::string& x_name,
                 const std::string& y_name);

// Flat key-value experiment file; repeated keys form grids.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace biso
