#include "rydeit/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rydeit/constants.hpp"
#include "rydeit/errors.hpp"

namespace rydeit {

namespace {

void validate_points(const std::vector<SpectrumPoint>& pts, const char* what, std::size_t min_points) {
  if (pts.size() < min_points)
    throw UsageError(std::string("SpectrumData: need at least ") + std::to_string(min_points) + " " + what + " points");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].sigma > 0.0) || !std::isfinite(pts[i].sigma))
      throw UsageError(std::string("SpectrumData: ") + what + " sigma must be > 0");
    if (!std::isfinite(pts[i].value) || !std::isfinite(pts[i].delta_s))
      throw UsageError(std::string("SpectrumData: non-finite ") + what + " value");
    if (i > 0 && !(pts[i].delta_s > pts[i - 1].delta_s))
      throw UsageError(std::string("SpectrumData: ") + what + " detunings must be strictly increasing");
  }
}

std::vector<double> detunings(const std::vector<SpectrumPoint>& pts) {
  std::vector<double> x;
  x.reserve(pts.size());
  for (const auto& p : pts) x.push_back(p.delta_s);
  return x;
}

}  // namespace

void SpectrumData::validate() const {
  validate_points(transmission, "transmission", 8);
  if (!phase.empty()) validate_points(phase, "phase", 1);
}

EITParams to_eit(const SpectrumModel& model, const ModelParameters& p) {
  EITParams eit;
  eit.gamma_e = model.gamma_e;
  eit.gamma_rg = p.gamma_rg;
  eit.omega_c = p.omega_c;
  eit.delta_c = p.delta_c;
  eit.d_eg = model.d_eg;
  const double chi0_value = p.od_resonant / (model.geom.k_s * model.geom.length);
  eit.rho = chi0_value * codata::epsilon0 * codata::hbar * model.gamma_e / (2.0 * model.d_eg * model.d_eg);
  return eit;
}

ModelParameters from_eit(const SpectrumModel& model, const EITParams& eit) {
  return {model.geom.k_s * model.geom.length * chi0(eit), eit.omega_c, eit.gamma_rg, eit.delta_c};
}

std::vector<SpectrumRow> predict(const SpectrumModel& model, const ModelParameters& p,
                                 std::span<const double> grid) {
  return spectrum(to_eit(model, p), model.geom, grid);
}

FitProblem::FitProblem(SpectrumData data, SpectrumModel model, FitOptions options)
    : data_(std::move(data)), model_(model), options_(options) {
  data_.validate();
  model_.geom.validate();
  if (!(model_.gamma_e > 0.0) || !(model_.d_eg > 0.0)) throw UsageError("SpectrumModel: gamma_e and d_eg must be > 0");
  if (options_.fit_phase && data_.phase.empty()) throw UsageError("fit_spectrum: fit_phase requested without phase data");
  t_grid_ = detunings(data_.transmission);
  p_grid_ = detunings(data_.phase);
}

std::size_t FitProblem::size() const {
  return data_.transmission.size() + (options_.fit_phase ? data_.phase.size() : 0);
}

Eigen::Vector4d FitProblem::to_internal(const ModelParameters& p) const {
  const double omega = options_.omega_squared ? std::log(p.omega_c * p.omega_c) : std::log(p.omega_c);
  return {std::log(p.od_resonant), omega, std::log(p.gamma_rg), p.delta_c / model_.gamma_e};
}

ModelParameters FitProblem::from_internal(const Eigen::Vector4d& t) const {
  const double omega = options_.omega_squared ? std::sqrt(std::exp(t(1))) : std::exp(t(1));
  return {std::exp(t(0)), omega, std::exp(t(2)), t(3) * model_.gamma_e};
}

Eigen::Vector4d FitProblem::natural_scale(const Eigen::Vector4d& t) const {
  const ModelParameters p = from_internal(t);
  return {p.od_resonant, options_.omega_squared ? 0.5 * p.omega_c : p.omega_c, p.gamma_rg, model_.gamma_e};
}

Eigen::VectorXd FitProblem::residuals(const Eigen::Vector4d& theta) const {
  const ModelParameters p = from_internal(theta);
  Eigen::VectorXd r(static_cast<Eigen::Index>(size()));
  const auto t_rows = predict(model_, p, t_grid_);
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < t_rows.size(); ++i, ++k)
    r(k) = (t_rows[i].transmission - data_.transmission[i].value) / data_.transmission[i].sigma;
  if (options_.fit_phase) {
    const auto p_rows = predict(model_, p, p_grid_);
    for (std::size_t i = 0; i < p_rows.size(); ++i, ++k)
      r(k) = (p_rows[i].phase - data_.phase[i].value) / data_.phase[i].sigma;
  }
  return r;
}

Eigen::MatrixXd FitProblem::jacobian(const Eigen::Vector4d& theta) const {
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(size()), 4);
  for (int j = 0; j < 4; ++j) {
    const double h = 1e-6 * (1.0 + std::abs(theta(j)));
    Eigen::Vector4d up = theta;
    Eigen::Vector4d down = theta;
    up(j) += h;
    down(j) -= h;
    jac.col(j) = (residuals(up) - residuals(down)) / (up(j) - down(j));
  }
  return jac;
}

FitResult fit_spectrum(const SpectrumData& data, const SpectrumModel& model, const ModelParameters& initial,
                       const FitBounds& bounds, const FitOptions& options) {
  const FitProblem problem(data, model, options);

  const auto lo_a = bounds.lower.as_array();
  const auto hi_a = bounds.upper.as_array();
  const auto init_a = initial.as_array();
  for (int j = 0; j < 4; ++j) {
    if (!(init_a[j] >= lo_a[j] && init_a[j] <= hi_a[j])) throw UsageError("fit_spectrum: initial point outside bounds");
    if (j < 3 && !(init_a[j] > 0.0)) throw UsageError("fit_spectrum: od, omega_c and gamma_rg must start > 0");
  }

  // Bounds in internal coordinates; log(0) = -inf is fine.
  auto internal_bound = [&](const std::array<double, 4>& b) {
    Eigen::Vector4d v;
    for (int j = 0; j < 3; ++j) {
      const double x = (j == 1 && options.omega_squared) ? b[j] * b[j] : b[j];
      v(j) = std::log(x);
    }
    v(3) = b[3] / model.gamma_e;
    return v;
  };
  const Eigen::Vector4d lo = internal_bound(lo_a);
  const Eigen::Vector4d hi = internal_bound(hi_a);

  Eigen::Vector4d theta = problem.to_internal(initial);
  Eigen::VectorXd r = problem.residuals(theta);
  double cost = 0.5 * r.squaredNorm();
  if (!std::isfinite(cost)) throw NumericalError("fit_spectrum: non-finite cost at the initial point");

  FitResult result;
  result.evaluations = 1;
  double lambda = -1.0;
  double nu = 2.0;
  bool converged = false;
  Eigen::Vector4d g = Eigen::Vector4d::Zero();

  int iter = 0;
  for (; iter < options.max_iterations && !converged; ++iter) {
    const Eigen::MatrixXd jac = problem.jacobian(theta);
    result.evaluations += 8;
    const Eigen::Matrix4d a = jac.transpose() * jac;
    g = jac.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() < options.gradient_tol) {
      converged = true;
      break;
    }
    const Eigen::Vector4d diag = a.diagonal().cwiseMax(1e-30 * a.diagonal().maxCoeff());
    if (lambda < 0.0) lambda = 1e-3;

    while (true) {
      Eigen::Matrix4d damped = a;
      damped.diagonal() += lambda * diag;
      const Eigen::Vector4d step = damped.ldlt().solve(-g);
      const Eigen::Vector4d trial = (theta + step).cwiseMax(lo).cwiseMin(hi);
      const Eigen::Vector4d taken = trial - theta;
      const Eigen::VectorXd r_trial = problem.residuals(trial);
      ++result.evaluations;
      const double cost_trial = 0.5 * r_trial.squaredNorm();

      if (std::isfinite(cost_trial) && cost_trial < cost) {
        const double predicted = 0.5 * taken.dot(lambda * diag.cwiseProduct(taken) - g);
        const double gain = predicted > 0.0 ? (cost - cost_trial) / predicted : 0.0;
        lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * gain - 1.0, 3));
        nu = 2.0;
        const double rel = (cost - cost_trial) / cost;
        theta = trial;
        r = r_trial;
        cost = cost_trial;
        if (rel < options.cost_rtol || taken.norm() <= 1e-14 * (theta.norm() + 1e-14)) converged = true;
        break;
      }
      lambda *= nu;
      nu *= 2.0;
      if (lambda > 1e16) {
        // No direction reduces the cost: the optimum is reached to rounding.
        converged = true;
        result.stalled = true;
        break;
      }
    }
  }

  if (!converged) {
    const auto p = problem.from_internal(theta).as_array();
    throw NonConvergence("fit_spectrum: iteration cap reached", {p.begin(), p.end()}, iter);
  }

  const Eigen::MatrixXd jac = problem.jacobian(theta);
  const Eigen::Matrix4d a = jac.transpose() * jac;
  g = jac.transpose() * r;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(a);
  const double emax = eig.eigenvalues().maxCoeff();
  const double emin = eig.eigenvalues().minCoeff();
  if (!(emax > 0.0) || !(emin > 1e-14 * emax))
    throw DegenerateParameters("fit_spectrum: singular Jacobian at the optimum; a parameter is unconstrained",
                               emax > 0.0 ? emin / emax : 0.0);

  const Eigen::Matrix4d cov_internal = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                                       eig.eigenvectors().transpose();
  const Eigen::Vector4d scale = problem.natural_scale(theta);
  result.covariance = scale.asDiagonal() * cov_internal * scale.asDiagonal();

  result.estimate = problem.from_internal(theta);
  result.uncertainty = ModelParameters::from_array(
      {std::sqrt(result.covariance(0, 0)), std::sqrt(result.covariance(1, 1)), std::sqrt(result.covariance(2, 2)),
       std::sqrt(result.covariance(3, 3))});
  result.chi_square = 2.0 * cost;
  const auto dof = static_cast<double>(problem.size()) - 4.0;
  result.reduced_chi_square = dof > 0.0 ? result.chi_square / dof : 0.0;
  result.iterations = iter;
  result.final_damping = lambda;
  result.gradient_norm = g.norm();
  return result;
}

}  // namespace rydeit
