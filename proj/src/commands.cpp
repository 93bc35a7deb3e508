#include "rydeit/commands.hpp"

#include <cmath>
#include <numbers>

#include "rydeit/blockade.hpp"
#include "rydeit/constants.hpp"
#include "rydeit/csv.hpp"
#include "rydeit/errors.hpp"
#include "rydeit/photostatistics.hpp"
#include "rydeit/polarization.hpp"

namespace rydeit {

using nlohmann::json;

namespace {

json header(const std::string& command, const RunConfig& config) {
  return {{"tool", "rydeit"}, {"version", RYDEIT_VERSION}, {"command", command}, {"config_echo", to_json(config)}};
}

json propagation_json(const Propagation& p) { return {{"od", p.od}, {"phase_rad", p.phase}}; }

json maybe(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// Maps x into (center - π, center + π].
double wrap_near(double x, double center) {
  const double two_pi = 2.0 * std::numbers::pi;
  return x - two_pi * std::ceil((x - center - std::numbers::pi) / two_pi);
}

double delta_t_for(const RunConfig& config) {
  if (config.blockade.delta_t_mhz) return angular_from_mhz(*config.blockade.delta_t_mhz);
  return transmission_fwhm(config.to_eit(), config.to_geometry());
}

}  // namespace

CommandResult cmd_spectrum(const RunConfig& config) {
  const EITParams eit = config.to_eit();
  const EITParams bare = eit.two_level();
  const MediumGeometry geom = config.to_geometry();
  const auto grid = config.spectrum_detunings();
  const auto grid_mhz = config.spectrum_grid_mhz();

  const auto with = spectrum(eit, geom, grid);
  const auto without = spectrum(bare, geom, grid);

  csv::Table table({"delta_s_mhz", "transmission_eit", "phase_eit_rad", "transmission_two_level",
                    "phase_two_level_rad"});
  for (std::size_t i = 0; i < grid.size(); ++i)
    table.add_row({grid_mhz[i], with[i].transmission, with[i].phase, without[i].transmission,
                   without[i].phase});

  const double ds = config.operating_delta_s();
  const Propagation op_eit = od_and_phase(chi(eit, ds), geom);
  const Propagation op_bare = od_and_phase(chi(bare, ds), geom);

  json summary = header("spectrum", config);
  try {
    summary["delta_t_mhz"] = mhz_from_angular(transmission_fwhm(eit, geom));
  } catch (const NoEitFeature&) {
    summary["delta_t_mhz"] = nullptr;
  }
  summary["chi0"] = chi0(eit);
  summary["od_resonant_two_level"] = geom.k_s * geom.length * chi0(eit);
  summary["operating_point"] = {{"delta_s_mhz", config.operating_delta_s_mhz},
                                {"phase0_rad", op_eit.phase},
                                {"transmission0", op_eit.transmission()},
                                {"phase_two_level_rad", op_bare.phase},
                                {"transmission_two_level", op_bare.transmission()},
                                {"phase_difference_rad", op_bare.phase - op_eit.phase}};
  summary["rows"] = grid.size();
  return {summary, {{"spectrum.csv", table.str()}}};
}

CommandResult cmd_blockade_phase(const RunConfig& config) {
  const EITParams eit = config.to_eit();
  const MediumGeometry geom = config.to_geometry();
  BlockadeParams blk = config.to_blockade();
  const double ds = config.operating_delta_s();

  const double delta_t = delta_t_for(config);
  const double r_b = blockade_radius(blk.c6, delta_t);

  auto orientation = [&](bool reversed) {
    BlockadeParams b = blk;
    b.sign_reversed = reversed;
    const Propagation p0 = integrated_phase(eit, geom, b, ds, 0);
    const Propagation p1 = integrated_phase(eit, geom, b, ds, 1);
    return json{{"no_excitation", propagation_json(p0)},
                {"one_excitation", propagation_json(p1)},
                {"controlled_phase_rad", p1.phase - p0.phase}};
  };
  const json default_signs = orientation(false);
  const json reversed = orientation(true);

  const double phase_eit = od_and_phase(chi(eit, ds), geom).phase;
  const double phase_bare = od_and_phase(chi(eit.two_level(), ds), geom).phase;
  const HardSphereEstimate hs = hard_sphere_controlled_phase(r_b, geom, phase_bare, phase_eit);

  const double cp = default_signs["controlled_phase_rad"].get<double>();
  const double cp_rev = reversed["controlled_phase_rad"].get<double>();

  json summary = header("blockade-phase", config);
  summary["delta_t_mhz"] = mhz_from_angular(delta_t);
  summary["c6_si"] = blk.c6;
  summary["blockade_radius_um"] = r_b * 1e6;
  summary["phase_eit_rad"] = phase_eit;
  summary["phase_two_level_rad"] = phase_bare;
  summary["phase_difference_rad"] = phase_bare - phase_eit;
  summary["hard_sphere"] = {{"controlled_phase_rad", hs.value}, {"clamped", hs.clamped}};
  summary["integral"] = blk.sign_reversed ? reversed : default_signs;
  summary["default_signs"] = default_signs;
  summary["reversed_signs"] = reversed;
  summary["reversal_ratio"] = maybe(std::abs(cp) / std::abs(cp_rev));
  return {summary, {}};
}

CommandResult cmd_density_scan(const RunConfig& config) {
  std::vector<double> rho;
  for (double n : config.density_scan_per_cm3) rho.push_back(n * 1e6);
  const DensityScan scan =
      density_scan(config.to_eit(), config.to_geometry(), config.to_blockade(), config.operating_delta_s(), rho);

  csv::Table table({"density_per_cm3", "phase0_rad", "phase1_rad", "controlled_phase_rad"});
  for (const auto& r : scan.rows) table.add_row({r.rho * 1e-6, r.phase0, r.phase1, r.controlled_phase});

  // Slopes per cm^-3: the fit ran on m^-3.
  auto fit_json = [](const LinearFit& f) {
    return json{{"slope_rad_per_cm3", f.slope * 1e6},
                {"intercept_rad", f.intercept},
                {"max_relative_residual", f.max_relative_residual}};
  };
  json summary = header("density-scan", config);
  summary["phase0_fit"] = fit_json(scan.phase0_fit);
  summary["phase1_fit"] = fit_json(scan.phase1_fit);
  summary["controlled_phase_fit"] = fit_json(scan.controlled_fit);
  summary["rows"] = scan.rows.size();
  return {summary, {{"density_scan.csv", table.str()}}};
}

CommandResult cmd_tomography(const RunConfig& config) {
  if (config.experiment.repetitions == 0)
    throw InsufficientStatistics("HV", "tomography: zero repetitions, no records in basis HV");

  const EITParams eit = config.to_eit();
  const MediumGeometry geom = config.to_geometry();
  const BlockadeParams blk = config.to_blockade();
  const double ds = config.operating_delta_s();

  const Propagation p0 = integrated_phase(eit, geom, blk, ds, 0);
  const Propagation p1 = integrated_phase(eit, geom, blk, ds, 1);
  PhaseTruth truth{p0.od, p0.phase, p1.od, p1.phase, config.polarization.sigma_plus_suppression,
                   config.polarization.coherence_empty, config.polarization.coherence_stored};

  const PolarizationState input = config.polarization.amplitude_ratio
                                      ? PolarizationState{*config.polarization.amplitude_ratio, 1.0}.normalized()
                                      : balanced_input(p1.od);

  const auto threads = static_cast<unsigned>(config.experiment.threads);
  ExperimentConfig with_control = config.to_experiment();
  ExperimentConfig without_control = with_control;
  without_control.mean_photons_control = 0.0;
  without_control.rng_seed = config.seed ^ 0xA5A5A5A5A5A5A5A5ULL;

  const auto records1 = simulate_run(with_control, truth, input, threads);
  const auto records0 = simulate_run(without_control, truth, input, threads);
  const CountSummary s1 = estimate_stokes(records1, true);
  const CountSummary s0 = estimate_stokes(records0, false);

  const double expected1 = stokes(apply_medium(input, p1.od, p1.phase, truth.sigma_plus_suppression)).phi();
  const double expected0 = stokes(apply_medium(input, p0.od, p0.phase, truth.sigma_plus_suppression)).phi();
  const double expected_cp = p1.phase - p0.phase;

  auto run_json = [](const CountSummary& s, double expected_azimuth) {
    json counts = json::object();
    for (std::size_t b = 0; b < 3; ++b)
      counts[std::string(basis_name(static_cast<Basis>(b)))] = {
          {"records", s.counts[b].records}, {"counts_k", s.counts[b].counts_k}, {"counts_l", s.counts[b].counts_l}};
    return json{{"stokes", {s.estimate.s_hv, s.estimate.s_da, s.estimate.s_lr}},
                {"standard_error", {s.standard_error[0], s.standard_error[1], s.standard_error[2]}},
                {"s0", s.estimate.s0()},
                {"azimuth_rad", s.estimate.phi()},
                {"azimuth_error_rad", maybe(s.azimuth_error())},
                {"expected_azimuth_rad", expected_azimuth},
                {"visibility", visibility(s.estimate)},
                {"visibility_error", s.visibility_error()},
                {"records_used", s.records_used},
                {"postselected", s.postselected},
                {"counts", counts}};
  };

  // With a finite σ+ suppression the reference arm also moves, so the azimuth
  // difference tracks (1 - 1/suppression) of the true controlled phase.
  const double expected_azimuth_cp = wrap_near(expected1 - expected0, expected_cp);
  const double measured_cp = wrap_near(s1.estimate.phi() - s0.estimate.phi(), expected_azimuth_cp);
  json summary = header("tomography", config);
  summary["truth"] = {{"od0", p0.od}, {"phase0_rad", p0.phase}, {"od1", p1.od}, {"phase1_rad", p1.phase},
                      {"controlled_phase_rad", expected_cp}};
  summary["input_state"] = {{"c_plus", input.c_plus.real()}, {"c_minus", input.c_minus.real()}};
  summary["stored"] = run_json(s1, expected1);
  summary["reference"] = run_json(s0, expected0);
  summary["controlled_phase_rad"] = measured_cp;
  summary["expected_controlled_phase_rad"] = expected_azimuth_cp;
  summary["controlled_phase_error_rad"] = maybe(std::hypot(s1.azimuth_error(), s0.azimuth_error()));

  csv::Table table({"run", "basis", "records", "counts_k", "counts_l"});
  for (int run = 0; run < 2; ++run) {
    const CountSummary& s = run == 0 ? s1 : s0;
    for (std::size_t b = 0; b < 3; ++b)
      table.add_row({static_cast<double>(run), static_cast<double>(b), static_cast<double>(s.counts[b].records),
                     static_cast<double>(s.counts[b].counts_k), static_cast<double>(s.counts[b].counts_l)});
  }
  return {summary, {{"tomography_counts.csv", table.str()}}};
}

SpectrumData spectrum_data_from_csv(const std::string& text) {
  const csv::ParsedTable t = csv::parse(text);
  const int ds = t.column("delta_s_mhz");
  const int tr = t.column("transmission");
  const int sg = t.column("sigma");
  if (ds < 0 || tr < 0 || sg < 0) throw UsageError("fit input: need columns delta_s_mhz, transmission, sigma");
  const int ph = t.column("phase_rad");
  const int ps = t.column("phase_sigma");
  if ((ph < 0) != (ps < 0)) throw UsageError("fit input: phase_rad and phase_sigma must appear together");

  SpectrumData data;
  for (const auto& row : t.rows) {
    const double x = angular_from_mhz(row[ds]);
    data.transmission.push_back({x, row[tr], row[sg]});
    if (ph >= 0) data.phase.push_back({x, row[ph], row[ps]});
  }
  data.validate();
  return data;
}

CommandResult cmd_fit(const RunConfig& config, const std::string& input_csv) {
  const SpectrumData data = spectrum_data_from_csv(input_csv);
  const SpectrumModel model = config.to_spectrum_model();
  FitOptions opts;
  opts.fit_phase = config.fit.fit_phase;
  opts.omega_squared = config.fit.omega_squared;
  opts.max_iterations = config.fit.max_iterations;
  const FitResult fit = fit_spectrum(data, model, config.fit_initial(), {}, opts);

  const ModelParameters& e = fit.estimate;
  const ModelParameters& u = fit.uncertainty;
  json summary = header("fit", config);
  summary["estimate"] = {{"od_resonant", e.od_resonant},
                         {"omega_c_mhz", mhz_from_angular(e.omega_c)},
                         {"gamma_rg_mhz", mhz_from_angular(e.gamma_rg)},
                         {"delta_c_mhz", mhz_from_angular(e.delta_c)},
                         {"density_per_cm3", to_eit(model, e).rho * 1e-6}};
  summary["uncertainty"] = {{"od_resonant", u.od_resonant},
                            {"omega_c_mhz", mhz_from_angular(u.omega_c)},
                            {"gamma_rg_mhz", mhz_from_angular(u.gamma_rg)},
                            {"delta_c_mhz", mhz_from_angular(u.delta_c)}};
  json cov = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int j = 0; j < 4; ++j) row.push_back(fit.covariance(i, j));
    cov.push_back(row);
  }
  summary["covariance_si"] = cov;
  summary["chi_square"] = fit.chi_square;
  summary["reduced_chi_square"] = fit.reduced_chi_square;
  summary["diagnostics"] = {{"iterations", fit.iterations},
                            {"evaluations", fit.evaluations},
                            {"final_damping", fit.final_damping},
                            {"gradient_norm", fit.gradient_norm},
                            {"stalled", fit.stalled}};
  try {
    summary["delta_t_mhz"] = mhz_from_angular(transmission_fwhm(to_eit(model, e), model.geom));
  } catch (const NoEitFeature&) {
    summary["delta_t_mhz"] = nullptr;
  }

  std::vector<double> grid;
  for (const auto& p : data.transmission) grid.push_back(p.delta_s);
  const auto rows = predict(model, e, grid);
  csv::Table table({"delta_s_mhz", "transmission_data", "transmission_model", "phase_model_rad"});
  for (std::size_t i = 0; i < rows.size(); ++i)
    table.add_row({mhz_from_angular(grid[i]), data.transmission[i].value, rows[i].transmission, rows[i].phase});
  return {summary, {{"fit_prediction.csv", table.str()}}};
}

CommandResult cmd_retrieval(const RunConfig& config) {
  const ExperimentConfig x = config.to_experiment();
  x.validate();
  csv::Table table({"t_us", "efficiency"});
  const int n = config.retrieval.points;
  for (int i = 0; i < n; ++i) {
    const double t_us = config.retrieval.max_time_us * i / (n - 1);
    table.add_row({t_us, retrieval_efficiency(x, t_us * 1e-6)});
  }
  json summary = header("retrieval", config);
  summary["tau_us"] = maybe(retrieval_time_constant(x) * 1e6);
  summary["efficiency_zero_delay"] = retrieval_efficiency(x, 0.0);
  summary["efficiency_at_delayed_time"] = retrieval_efficiency(x, x.delayed_time);
  summary["efficiency_at_delay"] = retrieval_efficiency(x, x.delay);
  summary["p_store"] = x.p_store();
  summary["p_retrieve"] = x.p_retrieve();
  return {summary, {{"retrieval.csv", table.str()}}};
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"spectrum", "blockade-phase", "density-scan",
                                              "tomography", "fit", "retrieval"};
  return names;
}

CommandResult run_command(const std::string& name, const RunConfig& config, const std::string& input_csv) {
  if (name == "spectrum") return cmd_spectrum(config);
  if (name == "blockade-phase") return cmd_blockade_phase(config);
  if (name == "density-scan") return cmd_density_scan(config);
  if (name == "tomography") return cmd_tomography(config);
  if (name == "fit") return cmd_fit(config, input_csv);
  if (name == "retrieval") return cmd_retrieval(config);
  throw UsageError("unknown command '" + name + "'");
}

}  // namespace rydeit
