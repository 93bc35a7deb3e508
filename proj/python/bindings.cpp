#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rydeit/blockade.hpp"
#include "rydeit/commands.hpp"
#include "rydeit/constants.hpp"
#include "rydeit/errors.hpp"
#include "rydeit/fitting.hpp"
#include "rydeit/photostatistics.hpp"
#include "rydeit/polarization.hpp"
#include "rydeit/susceptibility.hpp"

namespace py = pybind11;
using namespace rydeit;

namespace {

py::dict spectrum_dict(const std::vector<SpectrumRow>& rows) {
  std::vector<double> ds, t, ph;
  for (const auto& r : rows) {
    ds.push_back(r.delta_s);
    t.push_back(r.transmission);
    ph.push_back(r.phase);
  }
  py::dict d;
  d["delta_s"] = ds;
  d["transmission"] = t;
  d["phase"] = ph;
  return d;
}

py::dict params_dict(const ModelParameters& p) {
  py::dict d;
  d["od_resonant"] = p.od_resonant;
  d["omega_c"] = p.omega_c;
  d["gamma_rg"] = p.gamma_rg;
  d["delta_c"] = p.delta_c;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rydberg-EIT cross-phase modulation: susceptibility, blockade, tomography, fitting";
  m.attr("__version__") = RYDEIT_VERSION;

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", error.ptr());
  py::register_exception<NoEitFeature>(m, "NoEitFeature", numerical.ptr());
  py::register_exception<NonConvergence>(m, "NonConvergence", numerical.ptr());
  py::register_exception<DegenerateParameters>(m, "DegenerateParameters", numerical.ptr());
  py::register_exception<InsufficientStatistics>(m, "InsufficientStatistics", error.ptr());

  m.def("c6_from_atomic_units", &c6_from_atomic_units, py::arg("c6_au"));
  m.def("angular_from_mhz", &angular_from_mhz, py::arg("f_mhz"));
  m.def("mhz_from_angular", &mhz_from_angular, py::arg("omega"));

  py::class_<EITParams>(m, "EITParams")
      .def(py::init([](double gamma_e, double gamma_rg, double omega_c, double delta_c, double rho, double d_eg) {
             return EITParams{gamma_e, gamma_rg, omega_c, delta_c, rho, d_eg};
           }),
           py::arg("gamma_e"), py::arg("gamma_rg"), py::arg("omega_c"), py::arg("delta_c"), py::arg("rho"),
           py::arg("d_eg"))
      .def_readwrite("gamma_e", &EITParams::gamma_e)
      .def_readwrite("gamma_rg", &EITParams::gamma_rg)
      .def_readwrite("omega_c", &EITParams::omega_c)
      .def_readwrite("delta_c", &EITParams::delta_c)
      .def_readwrite("rho", &EITParams::rho)
      .def_readwrite("d_eg", &EITParams::d_eg)
      .def("two_level", &EITParams::two_level);

  py::class_<MediumGeometry>(m, "MediumGeometry")
      .def(py::init([](double length, double k_s) { return MediumGeometry{length, k_s}; }), py::arg("length"),
           py::arg("k_s"))
      .def_readwrite("length", &MediumGeometry::length)
      .def_readwrite("k_s", &MediumGeometry::k_s);

  py::class_<BlockadeParams>(m, "BlockadeParams")
      .def(py::init([](double c6, std::optional<double> z, bool reversed) { return BlockadeParams{c6, z, reversed}; }),
           py::arg("c6"), py::arg("excitation_z") = py::none(), py::arg("sign_reversed") = false)
      .def_readwrite("c6", &BlockadeParams::c6)
      .def_readwrite("excitation_z", &BlockadeParams::excitation_z)
      .def_readwrite("sign_reversed", &BlockadeParams::sign_reversed);

  m.def("chi0", &chi0, py::arg("params"));
  m.def("chi", &chi, py::arg("params"), py::arg("delta_s"));
  m.def(
      "od_and_phase",
      [](std::complex<double> c, const MediumGeometry& g) {
        const Propagation p = od_and_phase(c, g);
        return py::make_tuple(p.od, p.phase);
      },
      py::arg("chi"), py::arg("geometry"));
  m.def(
      "spectrum",
      [](const EITParams& p, const MediumGeometry& g, const std::vector<double>& grid) {
        return spectrum_dict(spectrum(p, g, grid));
      },
      py::arg("params"), py::arg("geometry"), py::arg("delta_s_grid"));
  m.def("transmission_fwhm", &transmission_fwhm, py::arg("params"), py::arg("geometry"));

  m.def("vdw_shift", &vdw_shift, py::arg("c6"), py::arg("r"));
  m.def("blockade_radius", &blockade_radius, py::arg("c6"), py::arg("delta_t"));
  m.def("chi_blockaded", &chi_blockaded, py::arg("params"), py::arg("blockade"), py::arg("delta_s"), py::arg("r"));
  m.def(
      "integrated_phase",
      [](const EITParams& p, const MediumGeometry& g, const BlockadeParams& b, double ds, int n) {
        const Propagation r = integrated_phase(p, g, b, ds, n);
        return py::make_tuple(r.od, r.phase);
      },
      py::arg("params"), py::arg("geometry"), py::arg("blockade"), py::arg("delta_s"), py::arg("n_excitations"));
  m.def("controlled_phase", &controlled_phase, py::arg("params"), py::arg("geometry"), py::arg("blockade"),
        py::arg("delta_s"));
  m.def(
      "hard_sphere_controlled_phase",
      [](double r_b, const MediumGeometry& g, double two_level, double eit) {
        const HardSphereEstimate e = hard_sphere_controlled_phase(r_b, g, two_level, eit);
        return py::make_tuple(e.value, e.clamped);
      },
      py::arg("r_b"), py::arg("geometry"), py::arg("phase_two_level"), py::arg("phase_eit"));

  m.def(
      "apply_medium",
      [](std::complex<double> cp, std::complex<double> cm, double od, double phi, double suppression) {
        const PolarizationState s = apply_medium({cp, cm}, od, phi, suppression);
        return py::make_tuple(s.c_plus, s.c_minus);
      },
      py::arg("c_plus"), py::arg("c_minus"), py::arg("od"), py::arg("phi"),
      py::arg("sigma_plus_suppression") = std::numeric_limits<double>::infinity());
  m.def(
      "stokes",
      [](std::complex<double> cp, std::complex<double> cm, double coherence) {
        const StokesVector s = stokes({cp, cm}, coherence);
        py::dict d;
        d["s_hv"] = s.s_hv;
        d["s_da"] = s.s_da;
        d["s_lr"] = s.s_lr;
        d["s0"] = s.s0();
        d["theta"] = s.theta();
        d["phi"] = s.phi();
        d["visibility"] = visibility(s);
        return d;
      },
      py::arg("c_plus"), py::arg("c_minus"), py::arg("coherence") = 1.0);
  m.def("fringe_power", &fringe_power, py::arg("p_total"), py::arg("v"), py::arg("phi"), py::arg("alpha"));

  m.def(
      "retrieval_efficiency",
      [](double t, double eta0, double eta_delayed, double delayed_time) {
        ExperimentConfig c;
        c.storage_retrieval_efficiency_zero_delay = eta0;
        c.storage_retrieval_efficiency_delayed = eta_delayed;
        c.delayed_time = delayed_time;
        c.validate();
        return retrieval_efficiency(c, t);
      },
      py::arg("t"), py::arg("eta0") = 0.2, py::arg("eta_delayed") = 0.07, py::arg("delayed_time") = 4.5e-6);

  m.def(
      "fit_transmission",
      [](const std::vector<double>& delta_s, const std::vector<double>& transmission, const std::vector<double>& sigma,
         double gamma_e, double d_eg, const MediumGeometry& geom, const py::dict& initial) {
        if (delta_s.size() != transmission.size() || delta_s.size() != sigma.size())
          throw UsageError("fit_transmission: input arrays differ in length");
        SpectrumData data;
        for (std::size_t i = 0; i < delta_s.size(); ++i) data.transmission.push_back({delta_s[i], transmission[i], sigma[i]});
        const ModelParameters init{initial["od_resonant"].cast<double>(), initial["omega_c"].cast<double>(),
                                   initial["gamma_rg"].cast<double>(), initial["delta_c"].cast<double>()};
        const FitResult r = fit_spectrum(data, SpectrumModel{gamma_e, d_eg, geom}, init);
        py::dict d;
        d["estimate"] = params_dict(r.estimate);
        d["uncertainty"] = params_dict(r.uncertainty);
        d["chi_square"] = r.chi_square;
        d["reduced_chi_square"] = r.reduced_chi_square;
        d["iterations"] = r.iterations;
        return d;
      },
      py::arg("delta_s"), py::arg("transmission"), py::arg("sigma"), py::arg("gamma_e"), py::arg("d_eg"),
      py::arg("geometry"), py::arg("initial"));

  m.def(
      "run_command",
      [](const std::string& name, const std::string& config_json, const std::string& input_csv) {
        const RunConfig config = parse_config_text(config_json.empty() ? "{}" : config_json);
        CommandResult r;
        {
          py::gil_scoped_release release;
          r = run_command(name, config, input_csv);
        }
        py::dict files;
        for (const auto& f : r.files) files[py::str(f.name)] = f.content;
        return py::make_tuple(r.summary.dump(), files);
      },
      py::arg("name"), py::arg("config_json") = "{}", py::arg("input_csv") = "");
  m.def("command_names", &command_names);
  m.def("default_config_json", [] { return to_json(RunConfig{}).dump(2); });
}
