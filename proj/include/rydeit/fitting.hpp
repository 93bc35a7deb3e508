#pragma once

#include <array>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rydeit/susceptibility.hpp"

namespace rydeit {

struct SpectrumPoint {
  double delta_s = 0.0;  ///< rad/s
  double value = 0.0;    ///< transmission, or phase in rad
  double sigma = 0.0;
};

/// Measured transmission spectrum, optionally with phase points.
struct SpectrumData {
  std::vector<SpectrumPoint> transmission;
  std::vector<SpectrumPoint> phase;

  /// >= 8 transmission points, sigma > 0, strictly increasing detuning.
  void validate() const;
};

/// Quantities held fixed during a fit.
struct SpectrumModel {
  double gamma_e = 0.0;
  double d_eg = 0.0;
  MediumGeometry geom;
};

/// Free parameters. `od_resonant` = k_s L χ0 is the two-level optical depth on
/// resonance (density times length, lumped).
struct ModelParameters {
  double od_resonant = 0.0;
  double omega_c = 0.0;   ///< rad/s
  double gamma_rg = 0.0;  ///< rad/s
  double delta_c = 0.0;   ///< rad/s

  std::array<double, 4> as_array() const { return {od_resonant, omega_c, gamma_rg, delta_c}; }
  static ModelParameters from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }
};

EITParams to_eit(const SpectrumModel& model, const ModelParameters& p);
ModelParameters from_eit(const SpectrumModel& model, const EITParams& eit);

/// Forward model: susceptibility spectrum for the given parameters.
std::vector<SpectrumRow> predict(const SpectrumModel& model, const ModelParameters& p,
                                 std::span<const double> delta_s_grid);

struct FitBounds {
  ModelParameters lower{0.0, 0.0, 0.0, -std::numeric_limits<double>::infinity()};
  ModelParameters upper{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                        std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
};

struct FitOptions {
  bool fit_phase = false;         ///< include phase points in the residual vector
  bool omega_squared = false;     ///< use log(Ω_c²) instead of log(Ω_c) as the free coordinate
  int max_iterations = 500;
  double cost_rtol = 1e-10;
  double gradient_tol = 1e-8;
};

struct FitResult {
  ModelParameters estimate;
  ModelParameters uncertainty;  ///< 1σ, from the covariance
  Eigen::Matrix4d covariance;   ///< in natural units (rad/s for rates)
  double chi_square = 0.0;
  double reduced_chi_square = 0.0;
  int iterations = 0;
  int evaluations = 0;
  double final_damping = 0.0;
  double gradient_norm = 0.0;
  bool stalled = false;  ///< stopped because no step reduced the cost any further
};

/// Weighted residuals and their Jacobian in the internal coordinates
///   θ = (log od, log Ω_c [or log Ω_c²], log γ_rg, Δ_c / Γ_e).
class FitProblem {
public:
  FitProblem(SpectrumData data, SpectrumModel model, FitOptions options);

  std::size_t size() const;
  Eigen::Vector4d to_internal(const ModelParameters& p) const;
  ModelParameters from_internal(const Eigen::Vector4d& theta) const;
  /// d(natural)/d(internal), diagonal.
  Eigen::Vector4d natural_scale(const Eigen::Vector4d& theta) const;

  Eigen::VectorXd residuals(const Eigen::Vector4d& theta) const;
  /// Central differences with step 1e-6 (1 + |θ_j|).
  Eigen::MatrixXd jacobian(const Eigen::Vector4d& theta) const;

  const SpectrumData& data() const { return data_; }
  const SpectrumModel& model() const { return model_; }
  const FitOptions& options() const { return options_; }

private:
  SpectrumData data_;
  SpectrumModel model_;
  FitOptions options_;
  std::vector<double> t_grid_;
  std::vector<double> p_grid_;
};

/// Damped least squares (Levenberg-Marquardt with Marquardt diagonal scaling).
/// Throws NonConvergence at the iteration cap and DegenerateParameters when
/// J^T J is singular at the optimum.
FitResult fit_spectrum(const SpectrumData& data, const SpectrumModel& model, const ModelParameters& initial,
                       const FitBounds& bounds = {}, const FitOptions& options = {});

}  // namespace rydeit
