#include <doctest.h>

#include <cmath>
#include <random>

#include "rydeit/errors.hpp"
#include "rydeit/fitting.hpp"
#include "support.hpp"

using namespace rydeit;
using rydeit::testing::Golden;
using rydeit::testing::linspace;
using rydeit::testing::mhz;
using rydeit::testing::relative_error;

namespace {

struct Setup {
  SpectrumModel model;
  ModelParameters truth;
  std::vector<double> grid;
};

Setup setup(int points = 200) {
  const Golden g;
  Setup s;
  s.model = g.config.to_spectrum_model();
  s.truth = from_eit(s.model, g.eit);
  s.grid = linspace(mhz(-30.0), mhz(30.0), points);
  return s;
}

SpectrumData synthetic(const Setup& s, double noise, std::uint64_t seed, bool with_phase = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  SpectrumData d;
  for (const auto& row : predict(s.model, s.truth, s.grid)) {
    d.transmission.push_back({row.delta_s, row.transmission + noise * n(rng), noise > 0.0 ? noise : 0.01});
    if (with_phase) d.phase.push_back({row.delta_s, row.phase + noise * n(rng), noise > 0.0 ? noise : 0.01});
  }
  return d;
}

ModelParameters perturbed(const ModelParameters& p) {
  return {p.od_resonant * 0.8, p.omega_c * 0.85, p.gamma_rg * 2.5, p.delta_c - mhz(1.0)};
}

}  // namespace

TEST_CASE("predict shares the spectrum code path") {
  const Setup s = setup(50);
  const auto a = predict(s.model, s.truth, s.grid);
  const auto b = spectrum(to_eit(s.model, s.truth), s.model.geom, s.grid);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].transmission == b[i].transmission);
    CHECK(a[i].phase == b[i].phase);
  }

  ModelParameters bare = s.truth;
  bare.omega_c = 0.0;
  const std::vector<double> zero{0.0};
  CHECK(predict(s.model, bare, zero)[0].transmission == doctest::Approx(std::exp(-s.truth.od_resonant)));
}

TEST_CASE("od lump round trip") {
  const Setup s = setup();
  const EITParams e = to_eit(s.model, s.truth);
  CHECK(relative_error(from_eit(s.model, e).od_resonant, s.truth.od_resonant) < 1e-14);
  CHECK(relative_error(e.rho, Golden{}.eit.rho) < 1e-12);
}

TEST_CASE("noiseless recovery") {
  const Setup s = setup();
  const FitResult r = fit_spectrum(synthetic(s, 0.0, 0), s.model, perturbed(s.truth));
  const auto got = r.estimate.as_array();
  const auto want = s.truth.as_array();
  for (int j = 0; j < 4; ++j) CHECK(relative_error(got[j], want[j]) < 1e-3);
  CHECK(r.chi_square < 1e-12);
  CHECK(mhz_from_angular(transmission_fwhm(to_eit(s.model, r.estimate), s.model.geom)) ==
        doctest::Approx(3.7).epsilon(0.02));
}

TEST_CASE("noisy fit reports sane diagnostics") {
  const Setup s = setup();
  const FitResult r = fit_spectrum(synthetic(s, 0.01, 17), s.model, perturbed(s.truth));
  CHECK(r.reduced_chi_square == doctest::Approx(1.0).epsilon(0.3));
  for (double u : r.uncertainty.as_array()) CHECK(u > 0.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(r.covariance);
  CHECK(eig.eigenvalues().minCoeff() >= 0.0);
  CHECK(r.iterations > 0);
  CHECK(r.final_damping > 0.0);
}

TEST_CASE("refitting from the optimum is idempotent") {
  const Setup s = setup();
  const SpectrumData d = synthetic(s, 0.01, 5);
  const FitResult first = fit_spectrum(d, s.model, perturbed(s.truth));
  const FitResult again = fit_spectrum(d, s.model, first.estimate);
  CHECK(again.iterations <= 2);
  CHECK(std::abs(again.chi_square - first.chi_square) <= 1e-12 * first.chi_square);
}

TEST_CASE("fitting Omega or Omega squared gives the same curve") {
  const Setup s = setup();
  const SpectrumData d = synthetic(s, 0.01, 6);
  FitOptions sq;
  sq.omega_squared = true;
  const FitResult a = fit_spectrum(d, s.model, perturbed(s.truth));
  const FitResult b = fit_spectrum(d, s.model, perturbed(s.truth), {}, sq);
  CHECK(std::abs(a.chi_square - b.chi_square) < 1e-10 * a.chi_square);
  CHECK(relative_error(a.estimate.omega_c, b.estimate.omega_c) < 1e-5);
  // σ(Ω) maps through the same chain rule in both parameterizations.
  CHECK(relative_error(a.uncertainty.omega_c, b.uncertainty.omega_c) < 1e-3);
}

TEST_CASE("Jacobian matches an independent difference quotient") {
  const Setup s = setup(60);
  const FitProblem problem(synthetic(s, 0.01, 9), s.model, {});
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::Vector4d base = problem.to_internal(s.truth);
    const Eigen::Vector4d theta = base + Eigen::Vector4d(u(rng), u(rng), u(rng), u(rng));
    const Eigen::MatrixXd jac = problem.jacobian(theta);
    for (int j = 0; j < 4; ++j) {
      // Fourth-order five-point stencil with a different step.
      const double h = 1e-4 * (1.0 + std::abs(theta(j)));
      auto at = [&](double k) {
        Eigen::Vector4d t = theta;
        t(j) += k * h;
        return problem.residuals(t);
      };
      const Eigen::VectorXd ref = (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h);
      CHECK((jac.col(j) - ref).norm() <= 1e-6 * ref.norm());
    }
  }
}

TEST_CASE("joint transmission and phase fit") {
  const Setup s = setup(120);
  FitOptions opt;
  opt.fit_phase = true;
  const FitResult r = fit_spectrum(synthetic(s, 0.0, 0, true), s.model, perturbed(s.truth), {}, opt);
  const auto got = r.estimate.as_array();
  const auto want = s.truth.as_array();
  for (int j = 0; j < 4; ++j) CHECK(relative_error(got[j], want[j]) < 1e-3);
  CHECK_THROWS_AS(fit_spectrum(synthetic(s, 0.0, 0), s.model, s.truth, {}, opt), UsageError);
}

TEST_CASE("iteration cap raises non-convergence with the best point") {
  const Setup s = setup();
  FitOptions opt;
  opt.max_iterations = 1;
  try {
    fit_spectrum(synthetic(s, 0.01, 3), s.model, perturbed(s.truth), {}, opt);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.best_point().size() == 4);
    CHECK(e.iterations() == 1);
    CHECK(e.exit_code() == 3);
  }
}

TEST_CASE("an unconstrained parameter is reported as degenerate") {
  // Far from the two-photon resonance the window parameters leave no trace.
  Setup s = setup();
  s.truth.omega_c = 1.0;
  s.truth.gamma_rg = mhz(0.1);
  CHECK_THROWS_AS(fit_spectrum(synthetic(s, 0.0, 0), s.model, s.truth), DegenerateParameters);
}

TEST_CASE("input validation") {
  const Setup s = setup(8);
  SpectrumData d = synthetic(s, 0.0, 0);
  d.transmission.pop_back();
  CHECK_THROWS_AS(d.validate(), UsageError);
  d = synthetic(s, 0.0, 0);
  d.transmission[3].sigma = 0.0;
  CHECK_THROWS_AS(d.validate(), UsageError);
  d = synthetic(s, 0.0, 0);
  std::swap(d.transmission[1], d.transmission[2]);
  CHECK_THROWS_AS(d.validate(), UsageError);

  ModelParameters bad = s.truth;
  bad.gamma_rg = 0.0;
  CHECK_THROWS_AS(fit_spectrum(synthetic(s, 0.0, 0), s.model, bad), UsageError);
}
