#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rydeit/blockade.hpp"
#include "rydeit/fitting.hpp"
#include "rydeit/photostatistics.hpp"
#include "rydeit/susceptibility.hpp"

namespace rydeit {

// Configuration as written in the JSON document. Frequencies are Δ/2π in MHz,
// lengths in μm, densities in cm^-3; `to_*` converts to SI / angular units.

struct EitSection {
  double excited_lifetime_ns = 26.0;   // Γ_e = 1/(26 ns)
  double gamma_rg_mhz = 0.1;
  double omega_c_mhz = 11.75;
  double delta_c_mhz = 9.1;
  double density_per_cm3 = 1.8e12;     // peak density of the spectra
  double dipole_moment_cm = 2.534e-29; // Rb87 D2 cycling transition
};

struct GeometrySection {
  double length_um = 61.0;
  double signal_wavelength_nm = 780.241209686;
};

struct BlockadeSection {
  double c6_au = 2.3e23;
  std::optional<double> excitation_z_um;  // unset: medium center
  bool sign_reversed = false;
  std::optional<double> delta_t_mhz;      // unset: width of the model's own EIT window
};

struct GridSection {
  double min_mhz = -30.0;
  double max_mhz = 30.0;
  int points = 601;
};

struct PolarizationSection {
  double sigma_plus_suppression = 15.0;
  std::optional<double> amplitude_ratio;  // |c+|/|c-|; unset: balanced at OD_1
  double coherence_stored = 1.0;
  double coherence_empty = 1.0;
};

struct ExperimentSection {
  double mean_photons_control = 0.6;
  double mean_photons_target = 0.9;
  double detection_efficiency = 0.25;
  double storage_retrieval_efficiency_zero_delay = 0.2;
  double storage_retrieval_efficiency_delayed = 0.07;
  double delayed_time_us = 4.5;
  double delay_us = 0.0;
  std::optional<double> storage_probability;
  std::int64_t repetitions = 1000000;
  std::string basis_selection = "round_robin";
  int threads = 1;
};

struct FitSection {
  double od_resonant = 25.0;
  double omega_c_mhz = 10.0;
  double gamma_rg_mhz = 0.3;
  double delta_c_mhz = 8.0;
  bool fit_phase = false;
  bool omega_squared = false;
  int max_iterations = 500;
};

struct RetrievalSection {
  double max_time_us = 10.0;
  int points = 101;
};

struct RunConfig {
  EitSection eit;
  GeometrySection geometry;
  BlockadeSection blockade;
  double operating_delta_s_mhz = -10.0;
  GridSection spectrum_grid;
  std::vector<double> density_scan_per_cm3{0.3e12, 0.6e12, 0.9e12, 1.2e12, 1.5e12, 1.8e12};
  PolarizationSection polarization;
  ExperimentSection experiment;
  FitSection fit;
  RetrievalSection retrieval;
  std::uint64_t seed = 20160601;

  EITParams to_eit() const;
  MediumGeometry to_geometry() const;
  BlockadeParams to_blockade() const;
  ExperimentConfig to_experiment() const;
  SpectrumModel to_spectrum_model() const;
  ModelParameters fit_initial() const;
  double operating_delta_s() const;
  std::vector<double> spectrum_grid_mhz() const;    ///< Δ_s/2π, MHz
  std::vector<double> spectrum_detunings() const;  ///< Δ_s, rad/s
};

/// Parses and validates a configuration document. Missing keys take their
/// defaults; unknown keys and out-of-range values throw ConfigError carrying
/// the JSON pointer of the offending key.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);

/// Fully resolved configuration, defaults included.
nlohmann::json to_json(const RunConfig& config);

}  // namespace rydeit
