#pragma once

#include <complex>
#include <limits>
#include <span>
#include <string_view>

namespace rydeit {

// Basis convention (fixed for the whole library):
//
//   |L> = |σ+>                 |R> = |σ->
//   |H> = (|σ+> + |σ->)/√2     |V> = (|σ+> - |σ->)/√2
//   |D> = (|σ+> + i|σ->)/√2    |A> = (|σ+> - i|σ->)/√2
//
// so that S_HV + i S_DA = 2 conj(c+) c- / P and S_LR = (|c+|² - |c-|²)/P.
// With real positive input amplitudes the Stokes azimuth is arg(c-/c+),
// i.e. the phase picked up by the σ- component.

enum class Basis { HV, DA, LR };

std::string_view basis_name(Basis b);

/// Two-component target state c+|σ+> + c-|σ->. Deliberately unnormalized
/// after lossy propagation.
struct PolarizationState {
  std::complex<double> c_plus;
  std::complex<double> c_minus;

  double power() const { return std::norm(c_plus) + std::norm(c_minus); }
  PolarizationState normalized() const;
};

struct StokesVector {
  double s_hv = 0.0;
  double s_da = 0.0;
  double s_lr = 0.0;

  double s0() const;
  double theta() const;  ///< polar angle from the S_LR axis
  double phi() const;    ///< azimuth in (-π, π]
  double component(Basis b) const;
};

/// c- picks up exp(-od/2) exp(iφ); c+ picks up exp(iφ/suppression).
/// The default (infinite) suppression leaves σ+ untouched.
PolarizationState apply_medium(const PolarizationState& state, double od_minus, double phi_minus,
                               double sigma_plus_suppression = std::numeric_limits<double>::infinity());

/// Normalized Stokes vector. `coherence` in [0, 1] multiplies the σ+/σ-
/// coherence (the transverse components); 1 is a pure state.
StokesVector stokes(const PolarizationState& state, double coherence = 1.0);

/// √(S_HV² + S_DA²).
double visibility(const StokesVector& s);

/// P_total [1 + V cos(φ - 2α)] / 2.
double fringe_power(double p_total, double v, double phi, double alpha);

struct FringeFit {
  double p_total = 0.0;
  double visibility = 0.0;
  double phi = 0.0;
};

/// Linear least-squares recovery of (P_total, V, φ) from powers measured
/// behind a linear analyzer at angles α.
FringeFit fit_fringe(std::span<const double> alphas, std::span<const double> powers);

/// Real positive input amplitudes with |c+| = |c-| exp(-od/2), normalized,
/// so both output components carry equal power after a medium of depth `od`.
PolarizationState balanced_input(double od);

/// Normalized powers (P_k, P_l) behind the analyzer of basis `b`.
std::pair<double, double> basis_powers(const StokesVector& s, Basis b);

}  // namespace rydeit
