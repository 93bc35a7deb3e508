#pragma once

#include <complex>
#include <span>
#include <vector>

namespace rydeit {

/// Parameters of the ladder-scheme EIT susceptibility. All rates and
/// detunings are angular (rad/s); Γ_e is a population decay rate in 1/s.
struct EITParams {
  double gamma_e = 0.0;   ///< population decay rate of |e>
  double gamma_rg = 0.0;  ///< |g>-|r> dephasing rate
  double omega_c = 0.0;   ///< coupling Rabi frequency (magnitude)
  double delta_c = 0.0;   ///< coupling detuning
  double rho = 0.0;       ///< atomic density, 1/m^3
  double d_eg = 0.0;      ///< signal-transition dipole matrix element, C m

  /// Throws UsageError if an invariant is violated.
  void validate() const;

  /// Same medium with the coupling light switched off.
  EITParams two_level() const {
    EITParams p = *this;
    p.omega_c = 0.0;
    return p;
  }
};

struct MediumGeometry {
  double length = 0.0;  ///< axial length L, m
  double k_s = 0.0;     ///< vacuum wave vector of the signal light, 1/m

  void validate() const;
};

using Susceptibility = std::complex<double>;

/// Result of one susceptibility evaluation. `exact_eit` marks the γ_rg = 0,
/// Δ_c + Δ_s = 0 point where the coupling term diverges and χ is exactly 0.
struct ChiPoint {
  Susceptibility value;
  bool exact_eit = false;
};

/// Optical depth and phase accumulated by the σ- signal over the medium.
struct Propagation {
  double od = 0.0;
  double phase = 0.0;  ///< rad

  /// exp(-od), clamped to 0 below 1e-300.
  double transmission() const;
};

struct SpectrumRow {
  double delta_s = 0.0;  ///< rad/s
  double transmission = 0.0;
  double phase = 0.0;    ///< rad
};

/// χ0 = 2ρ|d_eg|²/(ε0 ħ Γ_e), the magnitude of χ on resonance without coupling light.
double chi0(const EITParams& params);

/// Ladder EIT susceptibility at signal detuning `delta_s`:
///   χ = i χ0 Γ_e / (Γ_e - 2iΔ_s + Ω_c²/(γ_rg - 2i(Δ_c + Δ_s - shift)))
/// `two_photon_shift` moves the two-photon resonance (used by the blockade
/// model); it may be ±infinity, in which case the coupling term vanishes.
ChiPoint evaluate_chi(const EITParams& params, double delta_s, double two_photon_shift = 0.0);

inline Susceptibility chi(const EITParams& params, double delta_s) {
  return evaluate_chi(params, delta_s).value;
}

/// od = k_s L Im χ, phase = k_s L Re χ / 2.
Propagation od_and_phase(Susceptibility chi, const MediumGeometry& geom);

/// Transmission and phase for each detuning. The grid must be non-empty and
/// strictly increasing.
std::vector<SpectrumRow> spectrum(const EITParams& params, const MediumGeometry& geom,
                                  std::span<const double> delta_s_grid);

/// Full width of the transparency window at half its height above the
/// two-level background, rad/s. Throws NoEitFeature if there is no window.
double transmission_fwhm(const EITParams& params, const MediumGeometry& geom);

/// Signal detuning of maximal excess transmission over the two-level background.
double transparency_peak(const EITParams& params, const MediumGeometry& geom);

}  // namespace rydeit
