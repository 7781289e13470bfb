#pragma once

#include <iosfwd>
#include <string>

#include "biso/model.hpp"
#include "biso/sampling.hpp"

namespace biso {

// Instance text format: header "n d model p h", n rows of d floats, then the
// row and column permutation lines (1-based ranks).
void write_instance(const BisoInstance& inst, std::ostream& os);
void write_instance_file(const BisoInstance& inst, const std::string& path);
BisoInstance read_instance(std::istream& is);
BisoInstance read_instance_file(const std::string& path);

// Observation CSV with columns t,i,j,y (1-based t, i, j).
void write_observations(const ObservationSet& obs, std::ostream& os);
void write_observations_file(const ObservationSet& obs, const std::string& path);
ObservationSet read_observations(std::istream& is, int n, int d, double lambda0);
ObservationSet read_observations_file(const std::string& path, int n, int d, double lambda0);

// Classification grid: one row per line over the alphabet {0, 1, N}.
void write_classification(const ClassificationMatrix& r, std::ostream& os);
ClassificationMatrix read_classification(std::istream& is, double p, double h);

}  // namespace biso
