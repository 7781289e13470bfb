#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "biso/classify.hpp"
#include "biso/harness.hpp"
#include "biso/io.hpp"
#include "biso/losses.hpp"
#include "biso/model.hpp"
#include "biso/sampling.hpp"
#include "biso/sohlob.hpp"

namespace py = pybind11;
using namespace biso;

namespace {

py::array_t<double> matrix_to_numpy(const Matrix& m) {
  py::array_t<double> out({m.rows, m.cols});
  std::copy(m.data.begin(), m.data.end(), out.mutable_data());
  return out;
}

Matrix numpy_to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2d array");
  Matrix m(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::copy(a.data(), a.data() + m.data.size(), m.data.begin());
  return m;
}

py::array_t<std::int8_t> classification_to_numpy(const ClassificationMatrix& r) {
  // 1, 0, or -1 for NA
  py::array_t<std::int8_t> out({r.rows, r.cols});
  auto* ptr = out.mutable_data();
  for (std::size_t idx = 0; idx < r.cells.size(); ++idx)
    ptr[idx] = r.cells[idx] == Cell::kNA ? -1 : static_cast<std::int8_t>(r.cells[idx]);
  return out;
}

Permutation permutation_from_list(const std::vector<std::int32_t>& mapping) {
  return Permutation::from_mapping(mapping);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Level-set recovery of bi-isotonic matrices from noisy partial observations";

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("child", &RngStream::child, py::arg("index"))
      .def("next_u64", &RngStream::next_u64)
      .def("next_unit", &RngStream::next_unit)
      .def("next_gaussian", &RngStream::next_gaussian)
      .def("poisson", &RngStream::poisson, py::arg("mean"));

  py::class_<Permutation>(m, "Permutation")
      .def(py::init(&permutation_from_list), py::arg("mapping"))
      .def_static("identity", &Permutation::identity, py::arg("n"))
      .def_static("random", &Permutation::random, py::arg("n"), py::arg("rng"))
      .def("inverse", &Permutation::inverse)
      .def("reversed", &Permutation::reversed)
      .def("mapping", [](const Permutation& p) { return p.mapping(); })
      .def("__len__", &Permutation::size)
      .def("__call__", [](const Permutation& p, int i) { return p(i); })
      .def("__eq__", [](const Permutation& a, const Permutation& b) { return a == b; });

  py::class_<BisoInstance>(m, "BisoInstance")
      .def_property_readonly("matrix", [](const BisoInstance& b) { return matrix_to_numpy(b.m); })
      .def_readonly("row_perm", &BisoInstance::row_perm)
      .def_readonly("col_perm", &BisoInstance::col_perm)
      .def_property_readonly("model", [](const BisoInstance& b) { return model_name(b.model); })
      .def_readonly("p", &BisoInstance::p)
      .def_readonly("h", &BisoInstance::h)
      .def_property_readonly("n", &BisoInstance::n)
      .def_property_readonly("d", &BisoInstance::d);

  py::class_<ClassificationMatrix>(m, "ClassificationMatrix")
      .def_property_readonly("cells",
                             [](const ClassificationMatrix& r) { return classification_to_numpy(r); })
      .def_readonly("p", &ClassificationMatrix::p)
      .def_readonly("h", &ClassificationMatrix::h)
      .def("text", [](const ClassificationMatrix& r) {
        std::ostringstream os;
        write_classification(r, os);
        return os.str();
      });

  py::class_<ObservationSet>(m, "ObservationSet")
      .def_readonly("n", &ObservationSet::n)
      .def_readonly("d", &ObservationSet::d)
      .def_readonly("lambda0", &ObservationSet::lambda0)
      .def_readonly("rows", &ObservationSet::rows)
      .def_readonly("cols", &ObservationSet::cols)
      .def_readonly("values", &ObservationSet::values)
      .def("count", &ObservationSet::count);

  py::class_<RankEstimate>(m, "RankEstimate")
      .def_readonly("pi_hat", &RankEstimate::pi_hat)
      .def_readonly("final_partition", &RankEstimate::final_partition)
      .def_readonly("rounds", &RankEstimate::rounds)
      .def("diagnostics", [](const RankEstimate& e) { return dump_diagnostics(e); });

  py::class_<RankPairResult>(m, "RankPairResult")
      .def_readonly("row", &RankPairResult::row)
      .def_readonly("col", &RankPairResult::col);

  py::class_<PipelineResult>(m, "PipelineResult")
      .def_readonly("r_hat", &PipelineResult::r_hat)
      .def_readonly("row_est", &PipelineResult::row_est)
      .def_readonly("col_est", &PipelineResult::col_est);

  // generators
  m.def("gen_two_value", &gen_two_value, py::arg("n"), py::arg("d"), py::arg("p"), py::arg("h"),
        py::arg("row_perm"), py::arg("col_perm"), py::arg("cut"));
  m.def("gen_noisy_sorting", &gen_noisy_sorting, py::arg("n"), py::arg("h"),
        py::arg("generalized"), py::arg("rng"));
  m.def("gen_packing", &gen_packing, py::arg("n"), py::arg("d"), py::arg("p"), py::arg("h"),
        py::arg("l"), py::arg("v"));
  m.def("gen_multi_level", &gen_multi_level, py::arg("n"), py::arg("d"), py::arg("values"),
        py::arg("rng"));
  m.def("gen_random_biso", &gen_random_biso, py::arg("n"), py::arg("d"), py::arg("rng"));
  m.def("staircase_diagonal", &staircase_diagonal, py::arg("n"), py::arg("d"));
  m.def("staircase_random", &staircase_random, py::arg("n"), py::arg("d"), py::arg("rng"));
  m.def("is_bi_isotonic", &is_bi_isotonic, py::arg("instance"));
  m.def("oracle_level_set", &oracle_level_set, py::arg("instance"), py::arg("p"), py::arg("h"));

  // sampling
  m.def(
      "draw_observations",
      [](const BisoInstance& inst, double lambda0, const std::string& noise, double sigma,
         RngStream& rng) {
        SamplingConfig cfg;
        cfg.lambda0 = lambda0;
        cfg.sigma = sigma;
        cfg.noise = noise == "bernoulli" ? NoiseKind::kBernoulli : NoiseKind::kGaussian;
        return draw_observations(inst, cfg, rng);
      },
      py::arg("instance"), py::arg("lambda0"), py::arg("noise"), py::arg("sigma"), py::arg("rng"));
  m.def("split_half", [](const ObservationSet& obs, RngStream& rng) { return split_half(obs, rng); },
        py::arg("obs"), py::arg("rng"));

  // losses
  m.def("loss_lph", &loss_lph, py::arg("instance"), py::arg("pi_hat"), py::arg("eta_hat"),
        py::arg("p"), py::arg("h"));
  m.def("loss_rph", &loss_rph, py::arg("instance"), py::arg("pi_hat"), py::arg("p"), py::arg("h"));
  m.def("loss_cph", &loss_cph, py::arg("instance"), py::arg("eta_hat"), py::arg("p"), py::arg("h"));
  m.def("loss_l01na", &loss_l01na, py::arg("truth"), py::arg("estimate"));
  m.def("loss_frobenius_perm", &loss_frobenius_perm, py::arg("instance"), py::arg("pi_hat"),
        py::arg("eta_hat"));
  m.def("kendall_tau", &kendall_tau, py::arg("pi1"), py::arg("pi2"));
  m.def("level_confusions",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& m_,
           const Permutation& rt, const Permutation& ct, const Permutation& re,
           const Permutation& ce, double p, double h) {
          return level_confusions(numpy_to_matrix(m_), rt, ct, re, ce, p, h);
        },
        py::arg("m"), py::arg("row_truth"), py::arg("col_truth"), py::arg("row_est"),
        py::arg("col_est"), py::arg("p"), py::arg("h"));

  // ranking and classification
  m.def(
      "rank_pair",
      [](const ObservationSet& obs, double p, double h, const std::string& policy, double sigma,
         double delta, double scale, RngStream& rng) {
        RankConfig cfg;
        cfg.sigma = sigma;
        cfg.delta = delta;
        cfg.scale = scale;
        const RankPolicy pol =
            policy == "shared" ? RankPolicy::kSharedSpec : RankPolicy::kSplitShift;
        return rank_pair(obs, {{p, h}}, pol, cfg, rng);
      },
      py::arg("obs"), py::arg("p"), py::arg("h"), py::arg("policy") = "splitshift",
      py::arg("sigma") = 1.0, py::arg("delta") = 0.1, py::arg("scale") = 1.0, py::arg("rng"));
  m.def(
      "estimate_level_set",
      [](const ObservationSet& obs, double p, double h, double sigma, double scale,
         RngStream& rng) {
        ClassifyConfig cfg;
        cfg.sigma = sigma;
        cfg.scale = scale;
        return estimate_level_set(obs, p, h, cfg, rng);
      },
      py::arg("obs"), py::arg("p"), py::arg("h"), py::arg("sigma") = 1.0, py::arg("scale") = 1.0,
      py::arg("rng"));
  m.def("pipeline_threshold_vector", [](double p, double h) {
    std::vector<std::pair<double, double>> out;
    for (const ThresholdPair& t : pipeline_threshold_vector(p, h)) out.emplace_back(t.p, t.h);
    return out;
  });
}
