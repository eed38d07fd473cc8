#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dfsim/analysis.hpp"
#include "dfsim/config.hpp"
#include "dfsim/errors.hpp"
#include "dfsim/oracle.hpp"

namespace py = pybind11;
using namespace dfsim;

namespace {

py::dict row_dict(const ResultsRow& r) {
  py::dict d;
  d["T"] = r.t;
  d["V_Z"] = r.vz;
  d["V_X"] = r.vx;
  d["F_low"] = r.f_low;
  d["rate_per_pulse"] = r.rate_per_pulse;
  d["rate_per_second"] = r.rate_per_second;
  d["chsh_flag"] = r.chsh;
  d["truncated_weight"] = r.truncated_weight;
  return d;
}

ExperimentConfig config_from_file(const std::string& path) {
  const auto kv = KeyValues::load(path);
  auto cfg = experiment_from(kv);
  kv.require_all_used();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_dfsim, m) {
  m.doc() = "Decoherence-free entanglement distribution simulator";
  m.attr("__version__") = kCodeVersion;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<UndefinedError>(m, "UndefinedError", base.ptr());
  py::register_exception<OracleMismatch>(m, "OracleMismatch", base.ptr());

  py::enum_<Variant>(m, "Variant")
      .value("COUNTER_PROPAGATING", Variant::CounterPropagating)
      .value("FORWARD_ALL_FROM_BOB", Variant::ForwardAllFromBob)
      .value("SINGLE_PHOTON_ANCILLA", Variant::SinglePhotonAncilla)
      .value("DIRECT_NO_DFS", Variant::DirectNoDfs);
  py::enum_<SourceKind>(m, "SourceKind").value("SPDC", SourceKind::Spdc).value("PAIR", SourceKind::Pair);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_static("ideal", &ExperimentConfig::ideal)
      .def_static("from_file", &config_from_file, py::arg("path"))
      .def_readwrite("variant", &ExperimentConfig::variant)
      .def_readwrite("source", &ExperimentConfig::source)
      .def_readwrite("gamma", &ExperimentConfig::gamma)
      .def_readwrite("mu", &ExperimentConfig::mu)
      .def_readwrite("transmittance", &ExperimentConfig::transmittance)
      .def_readwrite("eta", &ExperimentConfig::eta)
      .def_readwrite("eta_g", &ExperimentConfig::eta_g)
      .def_readwrite("dark_e", &ExperimentConfig::dark_e)
      .def_readwrite("dark_f", &ExperimentConfig::dark_f)
      .def_readwrite("dark_g", &ExperimentConfig::dark_g)
      .def_readwrite("s0", &ExperimentConfig::s0)
      .def_readwrite("sigma_um", &ExperimentConfig::sigma_um)
      .def_readwrite("delay_um", &ExperimentConfig::delay_um)
      .def_readwrite("gp_reflectance", &ExperimentConfig::gp_reflectance)
      .def_readwrite("phases", &ExperimentConfig::phases)
      .def_readwrite("phase_delta", &ExperimentConfig::phase_delta)
      .def_readwrite("cutoff", &ExperimentConfig::cutoff)
      .def_readwrite("pair_cutoff", &ExperimentConfig::pair_cutoff)
      .def_readwrite("alpha", &ExperimentConfig::alpha)
      .def_readwrite("beta", &ExperimentConfig::beta)
      .def_readwrite("include_dbar_branch", &ExperimentConfig::include_dbar_branch)
      .def_readwrite("rep_rate_hz", &ExperimentConfig::rep_rate_hz)
      .def("validate", &ExperimentConfig::validate)
      .def("__copy__", [](const ExperimentConfig& c) { return c; })
      .def("__deepcopy__", [](const ExperimentConfig& c, py::dict) { return c; });

  py::class_<ProtocolOutcome>(m, "ProtocolOutcome")
      .def_property_readonly("rho", [](const ProtocolOutcome& o) { return Eigen::Matrix4cd(o.dm.rho); })
      .def_readonly("success_probability", &ProtocolOutcome::success_probability)
      .def_readonly("coincidences", &ProtocolOutcome::coincidences)
      .def_readonly("components", &ProtocolOutcome::components)
      .def_readonly("truncated_weight", &ProtocolOutcome::truncated_weight)
      .def_readonly("warnings", &ProtocolOutcome::warnings)
      .def_property_readonly("fidelity", [](const ProtocolOutcome& o) { return fidelity_to_phi_plus(o.dm); })
      .def_property_readonly("visibilities", [](const ProtocolOutcome& o) {
        const auto v = visibilities(o);
        return py::make_tuple(v.vz, v.vx);
      });

  m.def("run_fixed_phase", &run_fixed_phase, py::arg("config"), py::arg("phi_h"), py::arg("phi_v"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_phase_averaged", &run_phase_averaged, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("f_low", &f_low, py::arg("v_z"), py::arg("v_x"));
  m.def("chsh_violation", &chsh_violation, py::arg("f_low"));
  m.def("sharing_rate", [](const ExperimentConfig& c) {
    const auto r = sharing_rate(c);
    return py::make_tuple(r.per_pulse, r.per_second);
  }, py::arg("config"));
  m.def("distribute_qubit", &distribute_qubit, py::arg("config"));

  m.def("calibrate_overlap", [](const ExperimentConfig& c, double anchor_t, double target_vx) {
    const auto r = calibrate_overlap(c, anchor_t, target_vx);
    py::dict d;
    d["s0"] = r.s0;
    d["V_X"] = r.vx;
    d["V_sp"] = r.v_sp;
    d["max_V_X"] = r.max_vx;
    d["iterations"] = r.iterations;
    return d;
  }, py::arg("config"), py::arg("anchor_T") = 0.1, py::arg("target_V_X") = 0.82);

  m.def("sweep_transmittance", [](const ExperimentConfig& c, std::vector<double> ts, unsigned threads) {
    ResultsTable t;
    {
      py::gil_scoped_release release;
      t = sweep_transmittance(c, std::move(ts), threads);
    }
    py::list rows;
    for (const auto& r : t.rows) rows.append(row_dict(r));
    return rows;
  }, py::arg("config"), py::arg("T_values"), py::arg("threads") = 0);

  m.def("delay_scan", [](const ExperimentConfig& c, const std::vector<double>& delays) {
    py::list out;
    for (const auto& p : delay_scan(c, delays)) {
      py::dict d;
      d["delay_um"] = p.delay_um;
      d["p_R"] = p.p_r;
      d["p_L"] = p.p_l;
      d["visibility"] = p.visibility;
      out.append(d);
    }
    return out;
  }, py::arg("config"), py::arg("delays_um"));
  m.def("calibrate_sigma", &calibrate_sigma, py::arg("config"), py::arg("fwhm_um"));
  m.def("visibility_fwhm", &visibility_fwhm, py::arg("config"));

  m.def("fit_loglog_slope", [](const std::vector<double>& x, const std::vector<double>& y) {
    const auto f = fit_loglog_slope(x, y);
    return py::make_tuple(f.slope, f.stderr_slope);
  }, py::arg("x"), py::arg("y"));

  m.def("event_distribution", &event_distribution, py::arg("config"));
  m.def("sample_events", [](const ExperimentConfig& c, std::uint64_t n, std::uint64_t seed) {
    std::vector<std::uint8_t> ev;
    {
      py::gil_scoped_release release;
      ev = sample_events(c, n, seed);
    }
    return py::array_t<std::uint8_t>(static_cast<py::ssize_t>(ev.size()), ev.data());
  }, py::arg("config"), py::arg("n_pulses"), py::arg("seed"));

  m.def("oracle_check", [](const ExperimentConfig& c, double tol) {
    OracleReport r;
    {
      py::gil_scoped_release release;
      r = oracle_check(c, tol);
    }
    py::dict d;
    d["max_deviation"] = r.max_deviation;
    d["compared"] = r.compared;
    d["passed"] = r.passed;
    return d;
  }, py::arg("config"), py::arg("tolerance") = 1e-9);
  m.def("random_oracle_config", &random_oracle_config, py::arg("seed"));
}
