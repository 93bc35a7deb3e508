#include "rydeit/susceptibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "rydeit/constants.hpp"
#include "rydeit/errors.hpp"

namespace rydeit {

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void EITParams::validate() const {
  if (!(std::isfinite(gamma_e) && gamma_e > 0.0)) throw UsageError("EITParams: gamma_e must be > 0");
  if (!finite_nonneg(gamma_rg)) throw UsageError("EITParams: gamma_rg must be >= 0");
  if (!finite_nonneg(omega_c)) throw UsageError("EITParams: omega_c must be >= 0");
  if (!std::isfinite(delta_c)) throw UsageError("EITParams: delta_c must be finite");
  if (!finite_nonneg(rho)) throw UsageError("EITParams: rho must be >= 0");
  if (!(std::isfinite(d_eg) && d_eg > 0.0)) throw UsageError("EITParams: d_eg must be > 0");
}

void MediumGeometry::validate() const {
  if (!(std::isfinite(length) && length > 0.0)) throw UsageError("MediumGeometry: length must be > 0");
  if (!(std::isfinite(k_s) && k_s > 0.0)) throw UsageError("MediumGeometry: k_s must be > 0");
}

double Propagation::transmission() const {
  const double t = std::exp(-od);
  return t < 1e-300 ? 0.0 : t;
}

double chi0(const EITParams& p) {
  return 2.0 * p.rho * p.d_eg * p.d_eg / (codata::epsilon0 * codata::hbar * p.gamma_e);
}

ChiPoint evaluate_chi(const EITParams& p, double delta_s, double two_photon_shift) {
  using namespace std::complex_literals;
  const double amplitude = chi0(p) * p.gamma_e;
  std::complex<double> denom{p.gamma_e, -2.0 * delta_s};

  if (p.omega_c > 0.0 && !std::isinf(two_photon_shift)) {
    const std::complex<double> two_photon{p.gamma_rg, -2.0 * (p.delta_c + delta_s - two_photon_shift)};
    if (two_photon == 0.0) return {0.0, true};
    denom += p.omega_c * p.omega_c / two_photon;
  }
  return {1i * amplitude / denom, false};
}

Propagation od_and_phase(Susceptibility c, const MediumGeometry& g) {
  const double kl = g.k_s * g.length;
  return {kl * c.imag(), 0.5 * kl * c.real()};
}

std::vector<SpectrumRow> spectrum(const EITParams& params, const MediumGeometry& geom,
                                  std::span<const double> grid) {
  params.validate();
  geom.validate();
  if (grid.empty()) throw UsageError("spectrum: detuning grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw UsageError("spectrum: detuning grid must be strictly increasing");

  std::vector<SpectrumRow> rows;
  rows.reserve(grid.size());
  for (double ds : grid) {
    const Propagation prop = od_and_phase(chi(params, ds), geom);
    rows.push_back({ds, prop.transmission(), prop.phase});
  }
  return rows;
}

namespace {

struct ExcessTransmission {
  EITParams eit;
  EITParams bare;
  MediumGeometry geom;

  double operator()(double ds) const {
    return od_and_phase(chi(eit, ds), geom).transmission() - od_and_phase(chi(bare, ds), geom).transmission();
  }
};

struct Peak {
  double position;
  double height;
};

Peak locate_peak(const ExcessTransmission& h, const EITParams& p) {
  if (!(p.omega_c > 0.0)) throw NoEitFeature("transmission_fwhm: no EIT feature (omega_c = 0)");

  const double center = -p.delta_c;
  const double half_width = std::max({2.0 * p.omega_c, 4.0 * p.gamma_e, 4.0 * p.gamma_rg});
  constexpr int n = 4001;
  const double step = 2.0 * half_width / (n - 1);

  int best = 0;
  double best_h = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double v = h(center - half_width + i * step);
    if (v > best_h) {
      best_h = v;
      best = i;
    }
  }
  if (!(best_h > 1e-9)) throw NoEitFeature("transmission_fwhm: no transmission excess above the two-level background");

  const double x0 = center - half_width + best * step;
  auto neg = [&](double x) { return -h(x); };
  const auto [xm, fm] = boost::math::tools::brent_find_minima(neg, x0 - step, x0 + step,
                                                              std::numeric_limits<double>::digits / 2);
  if (-fm >= best_h) return {xm, -fm};
  return {x0, best_h};
}

}  // namespace

double transparency_peak(const EITParams& params, const MediumGeometry& geom) {
  params.validate();
  geom.validate();
  const ExcessTransmission h{params, params.two_level(), geom};
  return locate_peak(h, params).position;
}

double transmission_fwhm(const EITParams& params, const MediumGeometry& geom) {
  params.validate();
  geom.validate();
  const ExcessTransmission h{params, params.two_level(), geom};
  const Peak peak = locate_peak(h, params);
  const double half = 0.5 * peak.height;
  auto f = [&](double x) { return h(x) - half; };

  // Walk outward until the excess drops below half maximum, then bisect.
  const double step = 1e-4 * std::max(params.omega_c, params.gamma_e);
  const double limit = 1000.0 * (params.gamma_e + params.omega_c);
  auto crossing = [&](double direction) {
    double inner = peak.position;
    double outer = inner;
    double dx = step;
    while (true) {
      outer = inner + direction * dx;
      if (f(outer) < 0.0) break;
      inner = outer;
      dx *= 1.25;
      if (std::abs(inner - peak.position) > limit)
        throw NoEitFeature("transmission_fwhm: transparency window does not fall to half maximum");
    }
    const double scale = std::max(std::abs(inner), std::abs(outer));
    auto tol = [scale](double a, double b) { return std::abs(b - a) <= 1e-13 * scale; };
    std::uintmax_t max_iter = 200;
    const auto [a, b] = direction > 0 ? boost::math::tools::toms748_solve(f, inner, outer, tol, max_iter)
                                      : boost::math::tools::toms748_solve(f, outer, inner, tol, max_iter);
    return 0.5 * (a + b);
  };

  return crossing(+1.0) - crossing(-1.0);
}

}  // namespace rydeit
