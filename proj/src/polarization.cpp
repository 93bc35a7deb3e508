#include "rydeit/polarization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "rydeit/errors.hpp"

namespace rydeit {

std::string_view basis_name(Basis b) {
  switch (b) {
    case Basis::HV: return "HV";
    case Basis::DA: return "DA";
    case Basis::LR: return "LR";
  }
  return "?";
}

PolarizationState PolarizationState::normalized() const {
  const double p = power();
  if (!(p > 0.0)) throw UsageError("PolarizationState: zero total power");
  const double s = 1.0 / std::sqrt(p);
  return {c_plus * s, c_minus * s};
}

double StokesVector::s0() const { return std::sqrt(s_hv * s_hv + s_da * s_da + s_lr * s_lr); }

double StokesVector::theta() const {
  const double r = s0();
  return r > 0.0 ? std::acos(std::clamp(s_lr / r, -1.0, 1.0)) : 0.0;
}

double StokesVector::phi() const {
  const double a = std::atan2(s_da, s_hv);
  return a == -std::numbers::pi ? std::numbers::pi : a;
}

double StokesVector::component(Basis b) const {
  switch (b) {
    case Basis::HV: return s_hv;
    case Basis::DA: return s_da;
    case Basis::LR: return s_lr;
  }
  return 0.0;
}

PolarizationState apply_medium(const PolarizationState& state, double od_minus, double phi_minus,
                               double sigma_plus_suppression) {
  if (!(od_minus >= 0.0)) throw UsageError("apply_medium: od must be >= 0");
  const std::complex<double> minus = std::exp(-0.5 * od_minus) * std::polar(1.0, phi_minus);
  const double plus_phase = std::isinf(sigma_plus_suppression) ? 0.0 : phi_minus / sigma_plus_suppression;
  return {state.c_plus * std::polar(1.0, plus_phase), state.c_minus * minus};
}

StokesVector stokes(const PolarizationState& state, double coherence) {
  const double p = state.power();
  if (!(p > 0.0)) throw UsageError("stokes: zero total power");
  const std::complex<double> cross = 2.0 * std::conj(state.c_plus) * state.c_minus / p * coherence;
  return {cross.real(), cross.imag(), (std::norm(state.c_plus) - std::norm(state.c_minus)) / p};
}

double visibility(const StokesVector& s) { return std::hypot(s.s_hv, s.s_da); }

double fringe_power(double p_total, double v, double phi, double alpha) {
  return 0.5 * p_total * (1.0 + v * std::cos(phi - 2.0 * alpha));
}

FringeFit fit_fringe(std::span<const double> alphas, std::span<const double> powers) {
  if (alphas.size() != powers.size() || alphas.size() < 3)
    throw UsageError("fit_fringe: need at least three (alpha, power) pairs");
  // P = a + b cos 2α + c sin 2α with a = P_total/2, (b, c) = a V (cos φ, sin φ).
  Eigen::MatrixXd design(alphas.size(), 3);
  Eigen::VectorXd rhs(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = std::cos(2.0 * alphas[i]);
    design(i, 2) = std::sin(2.0 * alphas[i]);
    rhs(i) = powers[i];
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  if (!(coef(0) > 0.0)) throw UsageError("fit_fringe: non-positive mean power");
  return {2.0 * coef(0), std::hypot(coef(1), coef(2)) / coef(0), std::atan2(coef(2), coef(1))};
}

PolarizationState balanced_input(double od) {
  if (!(od >= 0.0)) throw UsageError("balanced_input: od must be >= 0");
  return PolarizationState{std::exp(-0.5 * od), 1.0}.normalized();
}

std::pair<double, double> basis_powers(const StokesVector& s, Basis b) {
  const double c = s.component(b);
  return {0.5 * (1.0 + c), 0.5 * (1.0 - c)};
}

}  // namespace rydeit
