#include "biso/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace biso {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_permutation_line(const Permutation& p, std::ostream& os) {
  for (int i = 0; i < p.size(); ++i) os << (i ? " " : "") << p(i) + 1;
  os << "\n";
}

Permutation read_permutation_line(std::istream& is, int n) {
  std::vector<std::int32_t> mapping(n);
  for (int i = 0; i < n; ++i) {
    long v;
    if (!(is >> v)) throw std::runtime_error("instance file: truncated permutation line");
    mapping[i] = static_cast<std::int32_t>(v - 1);
  }
  return Permutation::from_mapping(std::move(mapping));
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return is;
}

}  // namespace

void write_instance(const BisoInstance& inst, std::ostream& os) {
  os << inst.n() << ' ' << inst.d() << ' ' << model_name(inst.model) << ' '
     << format_double(inst.p) << ' ' << format_double(inst.h) << "\n";
  for (int i = 0; i < inst.n(); ++i) {
    for (int j = 0; j < inst.d(); ++j) os << (j ? " " : "") << format_double(inst.m(i, j));
    os << "\n";
  }
  write_permutation_line(inst.row_perm, os);
  write_permutation_line(inst.col_perm, os);
}

void write_instance_file(const BisoInstance& inst, const std::string& path) {
  auto os = open_out(path);
  write_instance(inst, os);
}

BisoInstance read_instance(std::istream& is) {
  BisoInstance inst;
  int n, d;
  std::string model;
  if (!(is >> n >> d >> model >> inst.p >> inst.h))
    throw std::runtime_error("instance file: bad header");
  if (n < 1 || d < 1) throw std::runtime_error("instance file: bad dimensions");
  inst.model = model_from_name(model);
  inst.m = Matrix(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      if (!(is >> inst.m(i, j))) throw std::runtime_error("instance file: truncated matrix");
  inst.row_perm = read_permutation_line(is, n);
  inst.col_perm = read_permutation_line(is, d);
  return inst;
}

BisoInstance read_instance_file(const std::string& path) {
  auto is = open_in(path);
  return read_instance(is);
}

void write_observations(const ObservationSet& obs, std::ostream& os) {
  os << "t,i,j,y\n";
  for (std::int64_t t = 0; t < obs.count(); ++t)
    os << t + 1 << ',' << obs.rows[t] + 1 << ',' << obs.cols[t] + 1 << ','
       << format_double(obs.values[t]) << "\n";
}

void write_observations_file(const ObservationSet& obs, const std::string& path) {
  auto os = open_out(path);
  write_observations(obs, os);
}

ObservationSet read_observations(std::istream& is, int n, int d, double lambda0) {
  ObservationSet obs;
  obs.n = n;
  obs.d = d;
  obs.lambda0 = lambda0;
  std::string line;
  if (!std::getline(is, line) || line != "t,i,j,y")
    throw std::runtime_error("observation csv: bad header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    long t, i, j;
    double y;
    if (std::sscanf(line.c_str(), "%ld,%ld,%ld,%lf", &t, &i, &j, &y) != 4)
      throw std::runtime_error("observation csv: bad row: " + line);
    if (i < 1 || i > n || j < 1 || j > d)
      throw std::runtime_error("observation csv: index out of range");
    obs.rows.push_back(static_cast<std::int32_t>(i - 1));
    obs.cols.push_back(static_cast<std::int32_t>(j - 1));
    obs.values.push_back(y);
  }
  return obs;
}

ObservationSet read_observations_file(const std::string& path, int n, int d, double lambda0) {
  auto is = open_in(path);
  return read_observations(is, n, d, lambda0);
}

void write_classification(const ClassificationMatrix& r, std::ostream& os) {
  for (int i = 0; i < r.rows; ++i) {
    for (int j = 0; j < r.cols; ++j) {
      const Cell c = r.at(i, j);
      os << (c == Cell::kOne ? '1' : c == Cell::kZero ? '0' : 'N');
    }
    os << "\n";
  }
}

ClassificationMatrix read_classification(std::istream& is, double p, double h) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) lines.push_back(line);
  if (lines.empty()) throw std::runtime_error("classification grid: empty");
  const int rows = static_cast<int>(lines.size());
  const int cols = static_cast<int>(lines[0].size());
  ClassificationMatrix r(rows, cols, p, h);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(lines[i].size()) != cols)
      throw std::runtime_error("classification grid: ragged rows");
    for (int j = 0; j < cols; ++j) {
      switch (lines[i][j]) {
        case '1': r.at(i, j) = Cell::kOne; break;
        case '0': r.at(i, j) = Cell::kZero; break;
        case 'N': r.at(i, j) = Cell::kNA; break;
        default: throw std::runtime_error("classification grid: bad character");
      }
    }
  }
  return r;
}

}  // namespace biso
