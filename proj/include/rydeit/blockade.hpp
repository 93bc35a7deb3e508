#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rydeit/susceptibility.hpp"

namespace rydeit {

/// One stored Rydberg excitation interacting with the propagating target
/// polariton through V(r) = -C6/r^6.
struct BlockadeParams {
  double c6 = 0.0;                     ///< J m^6; > 0 is attractive
  std::optional<double> excitation_z;  ///< m along the medium; unset means the center
  bool sign_reversed = false;          ///< flip Δ_s and Δ_c together

  double excitation_position(const MediumGeometry& geom) const {
    return excitation_z.value_or(0.5 * geom.length);
  }
};

/// V(r)/ħ = -c6/(ħ r^6), rad/s. Throws UsageError for r <= 0.
double vdw_shift(double c6, double r);

/// R_b = |c6/(ħ Δ_T)|^{1/6}. Throws UsageError for delta_t <= 0.
double blockade_radius(double c6, double delta_t);

/// Susceptibility seen by the target at distance r from the stored excitation:
/// the two-photon detuning Δ_c + Δ_s is replaced by Δ_c + Δ_s - V(r)/ħ.
Susceptibility chi_blockaded(const EITParams& params, const BlockadeParams& blk, double delta_s, double r);

/// Optical depth and phase through the medium with 0 or 1 stored excitations.
/// With one excitation the susceptibility is integrated along z with
/// r = |z - z0| by adaptive Gauss-Kronrod quadrature (relative tolerance 1e-6).
Propagation integrated_phase(const EITParams& params, const MediumGeometry& geom, const BlockadeParams& blk,
                             double delta_s, int n_excitations);

/// φ1 - φ0 at one detuning.
double controlled_phase(const EITParams& params, const MediumGeometry& geom, const BlockadeParams& blk,
                        double delta_s);

struct HardSphereEstimate {
  double value = 0.0;    ///< rad
  bool clamped = false;  ///< the blockade sphere was longer than the medium
};

/// (2 r_b / L)(φ_two_level - φ_eit), with 2 r_b clamped to L.
HardSphereEstimate hard_sphere_controlled_phase(double r_b, const MediumGeometry& geom, double phase_two_level,
                                                double phase_eit);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_relative_residual = 0.0;  ///< max |residual| / max |y|
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct DensityScanRow {
  double rho = 0.0;
  double phase0 = 0.0;
  double phase1 = 0.0;
  double controlled_phase = 0.0;
};

struct DensityScan {
  std::vector<DensityScanRow> rows;
  LinearFit phase0_fit;
  LinearFit phase1_fit;
  LinearFit controlled_fit;
};

DensityScan density_scan(const EITParams& base, const MediumGeometry& geom, const BlockadeParams& blk,
                         double delta_s, std::span<const double> rho_grid);

}  // namespace rydeit
