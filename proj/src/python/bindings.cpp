#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sensorbf/batch_bca.hpp"
#include "sensorbf/cyclic_bca.hpp"
#include "sensorbf/errors.hpp"
#include "sensorbf/experiment.hpp"
#include "sensorbf/kkt.hpp"
#include "sensorbf/trs.hpp"
#include "sensorbf/verify.hpp"

namespace py = pybind11;
using namespace sensorbf;

namespace {

BeamformerSet to_set(const std::vector<CMat>& F) { return BeamformerSet{F}; }

std::vector<HermMat> to_herm(const std::vector<CMat>& v) {
  std::vector<HermMat> out;
  for (const auto& x : v) out.emplace_back(x);
  return out;
}

py::dict kkt_dict(const KktReport& k) {
  py::dict d;
  d["stationarity"] = k.stationarity;
  d["multipliers"] = k.multipliers;
  d["complementarity"] = k.complementarity;
  d["feasibility"] = k.feasibility;
  d["max_residual"] = k.max_residual;
  return d;
}

py::dict bca_dict(const BcaResult& r) {
  py::dict d;
  d["F"] = r.F.F;
  d["G"] = r.state.G;
  d["W"] = CMat(r.state.W.mat());
  d["mi"] = r.trace.mi;
  d["wall_s"] = r.trace.wall_s;
  d["kkt"] = r.trace.kkt ? py::object(kkt_dict(*r.trace.kkt)) : py::object(py::none());
  d["inner_budget_exhausted"] = r.trace.inner_budget_exhausted;
  return d;
}

BcaOptions bca_options(int max_outer, double mi_tol, bool compute_kkt) {
  BcaOptions o;
  o.max_outer = max_outer;
  o.mi_tol = mi_tol;
  o.compute_kkt = compute_kkt;
  return o;
}

}  // namespace

PYBIND11_MODULE(_sensorbf, m) {
  m.doc() = "Linear beamformer design for coherent-MAC sensor networks";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<NetworkModel>(m, "NetworkModel")
      .def(py::init([](const std::vector<CMat>& H, const CMat& sigma_s,
                       const std::vector<CMat>& sigma_i, double sigma0_sq,
                       const std::vector<double>& P) {
             return NetworkModel(H, HermMat(sigma_s), to_herm(sigma_i), sigma0_sq, P);
           }),
           py::arg("channels"), py::arg("sigma_s"), py::arg("sigma_i"), py::arg("sigma0_sq"),
           py::arg("budgets"))
      .def_property_readonly("K", &NetworkModel::K)
      .def_property_readonly("L", &NetworkModel::L)
      .def_property_readonly("M", &NetworkModel::M)
      .def_property_readonly("N", &NetworkModel::antenna_counts)
      .def_property_readonly("channels", &NetworkModel::channels)
      .def_property_readonly("sigma_s", [](const NetworkModel& x) { return CMat(x.sigma_s().mat()); })
      .def_property_readonly("sigma0_sq", &NetworkModel::sigma0_sq)
      .def_property_readonly("budgets", &NetworkModel::budgets);

  m.def("mutual_information",
        [](const NetworkModel& x, const std::vector<CMat>& F) {
          return mutual_information(x, to_set(F));
        },
        py::arg("model"), py::arg("F"));
  m.def("transmit_power",
        [](const NetworkModel& x, const std::vector<CMat>& F, Index i) {
          return transmit_power(x, to_set(F), i);
        },
        py::arg("model"), py::arg("F"), py::arg("i"));
  m.def("closed_form_state",
        [](const NetworkModel& x, const std::vector<CMat>& F) {
          const WmmseState s = closed_form_state(x, to_set(F));
          return py::make_tuple(s.G, CMat(s.W.mat()));
        },
        py::arg("model"), py::arg("F"), "Returns (G, W).");
  m.def("surrogate_objective",
        [](const NetworkModel& x, const std::vector<CMat>& F, const CMat& G, const CMat& W) {
          return surrogate_objective(x, to_set(F), WmmseState{HermMat(W), G});
        },
        py::arg("model"), py::arg("F"), py::arg("G"), py::arg("W"));
  m.def("mi_gradient",
        [](const NetworkModel& x, const std::vector<CMat>& F, Index i) {
          return mi_gradient(x, to_set(F), i);
        },
        py::arg("model"), py::arg("F"), py::arg("i"));
  m.def("kkt_residual",
        [](const NetworkModel& x, const std::vector<CMat>& F) {
          return kkt_dict(kkt_residual_p0(x, to_set(F)));
        },
        py::arg("model"), py::arg("F"));

  m.def("solve_trs",
        [](const CMat& Q, const CVec& q, double rho) {
          const TrsSolution s = solve_trs(TrsProblem{HermMat(Q), q, rho});
          py::dict d;
          d["x"] = s.x;
          d["mu"] = s.mu;
          d["kind"] = std::string(to_string(s.kind));
          d["kkt_residual"] = s.kkt_residual;
          return d;
        },
        py::arg("Q"), py::arg("q"), py::arg("rho"),
        "Minimize x^H Q x - 2 Re{q^H x} subject to ||x|| <= rho.");

  m.def("run_batch_bca",
        [](const NetworkModel& x, const std::vector<CMat>& F0, int max_outer, double mi_tol,
           bool compute_kkt) {
          return bca_dict(run_batch_bca(x, to_set(F0), bca_options(max_outer, mi_tol, compute_kkt)));
        },
        py::arg("model"), py::arg("F0"), py::arg("max_outer") = 100, py::arg("mi_tol") = 1e-8,
        py::arg("compute_kkt") = true);
  m.def("run_cyclic_bca",
        [](const NetworkModel& x, const std::vector<CMat>& F0, int max_outer, double mi_tol,
           bool compute_kkt) {
          return bca_dict(
              run_cyclic_bca(x, to_set(F0), bca_options(max_outer, mi_tol, compute_kkt)));
        },
        py::arg("model"), py::arg("F0"), py::arg("max_outer") = 100, py::arg("mi_tol") = 1e-8,
        py::arg("compute_kkt") = true);

  m.def("build_model",
        [](const std::string& config_json, std::uint64_t realization_seed, py::object snr_db) {
          const ScenarioConfig cfg = parse_config(config_json);
          return snr_db.is_none() ? build_model(cfg, realization_seed)
                                  : build_model(cfg, realization_seed, snr_db.cast<double>());
        },
        py::arg("config_json"), py::arg("realization_seed"), py::arg("snr_db") = py::none());
  m.def("random_feasible_initial",
        [](const NetworkModel& x, std::uint64_t seed) { return random_feasible_initial(x, seed).F; },
        py::arg("model"), py::arg("seed"));
  m.def("random_baseline_mi", &random_baseline_mi, py::arg("model"), py::arg("trials"),
        py::arg("seed"));
  m.def("derive_seed", &derive_seed, py::arg("seed"), py::arg("index"));
  m.def("normalize_config", [](const std::string& j) { return config_to_json(parse_config(j)); },
        py::arg("config_json"));

  m.def("run_experiment_json",
        [](const std::string& config_json, unsigned threads) {
          const ScenarioConfig cfg = parse_config(config_json);
          RunOptions ro;
          ro.threads = threads;
          ExperimentResult r;
          {
            py::gil_scoped_release release;
            r = run_experiment(cfg, ro);
          }
          std::ostringstream os;
          write_result_json(os, r);
          return os.str();
        },
        py::arg("config_json"), py::arg("threads") = 0);

  m.def("run_verify_suite",
        [](int instances, std::uint64_t seed) {
          py::list out;
          for (const auto& c : run_verify_suite(instances, seed).checks) {
            py::dict d;
            d["name"] = c.name;
            d["tol"] = c.tol;
            d["evaluated"] = c.evaluated;
            d["failures"] = c.failures;
            d["worst"] = c.worst;
            out.append(d);
          }
          return out;
        },
        py::arg("instances") = 20, py::arg("seed") = 1);
}
