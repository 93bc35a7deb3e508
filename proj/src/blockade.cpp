#include "rydeit/blockade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rydeit/constants.hpp"
#include "rydeit/errors.hpp"

namespace rydeit {

double vdw_shift(double c6, double r) {
  if (!(r > 0.0)) throw UsageError("vdw_shift: r must be > 0");
  const double r3 = r * r * r;
  return -c6 / (codata::hbar * r3 * r3);
}

double blockade_radius(double c6, double delta_t) {
  if (!(delta_t > 0.0)) throw UsageError("blockade_radius: delta_t must be > 0");
  return std::pow(std::abs(c6 / (codata::hbar * delta_t)), 1.0 / 6.0);
}

namespace {

struct Oriented {
  EITParams params;
  double delta_s;
};

Oriented orient(const EITParams& params, const BlockadeParams& blk, double delta_s) {
  if (!blk.sign_reversed) return {params, delta_s};
  EITParams p = params;
  p.delta_c = -p.delta_c;
  return {p, -delta_s};
}

// r = 0 is the limit of an infinite shift; the coupling term drops out.
double shift_at(double c6, double r) {
  if (r > 0.0) return vdw_shift(c6, r);
  if (c6 == 0.0) return 0.0;
  return c6 > 0.0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
}

struct Accumulator {
  double re = 0.0;
  double im = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

constexpr double kRelativeTolerance = 1e-6;

// Integrates χ(r) over r in [0, extent], splitting at geometric breakpoints
// around the radius where the vdW shift crosses the EIT scales. The radial
// coordinate is rescaled by that radius so the quadrature sees O(1) numbers.
void integrate_radial(const Oriented& o, double c6, double extent, Accumulator& acc) {
  if (extent <= 0.0) return;

  double r_feature = extent;
  std::vector<double> cuts{0.0};
  if (c6 != 0.0) {
    const EITParams& p = o.params;
    const double scale = std::max({p.gamma_e, p.omega_c, p.gamma_rg, std::abs(p.delta_c + o.delta_s)});
    r_feature = std::pow(std::abs(c6) / (codata::hbar * scale), 1.0 / 6.0);
    for (int k = -8; k <= 8; ++k) {
      const double x = std::pow(2.0, 0.5 * k);
      if (x * r_feature < extent) cuts.push_back(x);
    }
  }
  cuts.push_back(extent / r_feature);

  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    for (int part = 0; part < 2; ++part) {
      auto f = [&](double x) {
        const Susceptibility c = evaluate_chi(o.params, o.delta_s, shift_at(c6, x * r_feature)).value;
        return part == 0 ? c.real() : c.imag();
      };
      double err = 0.0;
      double l1 = 0.0;
      const double v = GK::integrate(f, cuts[i - 1], cuts[i], 20, 1e-11, &err, &l1);
      (part == 0 ? acc.re : acc.im) += v * r_feature;
      acc.error += err * r_feature;
      acc.l1 += l1 * r_feature;
    }
  }
}

}  // namespace

Susceptibility chi_blockaded(const EITParams& params, const BlockadeParams& blk, double delta_s, double r) {
  const double shift = vdw_shift(blk.c6, r);
  const Oriented o = orient(params, blk, delta_s);
  return evaluate_chi(o.params, o.delta_s, shift).value;
}

Propagation integrated_phase(const EITParams& params, const MediumGeometry& geom, const BlockadeParams& blk,
                             double delta_s, int n_excitations) {
  params.validate();
  geom.validate();
  if (n_excitations != 0 && n_excitations != 1)
    throw UsageError("integrated_phase: n_excitations must be 0 or 1");

  const Oriented o = orient(params, blk, delta_s);
  if (n_excitations == 0) return od_and_phase(chi(o.params, o.delta_s), geom);

  const double z0 = blk.excitation_position(geom);
  if (!(z0 >= 0.0 && z0 <= geom.length))
    throw UsageError("integrated_phase: excitation_z must lie within [0, L]");

  Accumulator acc;
  integrate_radial(o, blk.c6, z0, acc);
  integrate_radial(o, blk.c6, geom.length - z0, acc);

  const double achieved = acc.l1 > 0.0 ? acc.error / acc.l1 : 0.0;
  if (!(achieved <= kRelativeTolerance) || !std::isfinite(acc.re) || !std::isfinite(acc.im))
    throw NumericalError("integrated_phase: quadrature did not converge", achieved);

  return {geom.k_s * acc.im, 0.5 * geom.k_s * acc.re};
}

double controlled_phase(const EITParams& params, const MediumGeometry& geom, const BlockadeParams& blk,
                        double delta_s) {
  return integrated_phase(params, geom, blk, delta_s, 1).phase - integrated_phase(params, geom, blk, delta_s, 0).phase;
}

HardSphereEstimate hard_sphere_controlled_phase(double r_b, const MediumGeometry& geom, double phase_two_level,
                                                double phase_eit) {
  geom.validate();
  if (!(r_b >= 0.0)) throw UsageError("hard_sphere_controlled_phase: r_b must be >= 0");
  HardSphereEstimate est;
  double blocked = 2.0 * r_b;
  if (blocked > geom.length) {
    blocked = geom.length;
    est.clamped = true;
  }
  est.value = blocked / geom.length * (phase_two_level - phase_eit);
  return est;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw UsageError("fit_line: x and y must be non-empty and equal length");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;

  double ymax = 0.0;
  double rmax = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ymax = std::max(ymax, std::abs(y[i]));
    rmax = std::max(rmax, std::abs(y[i] - (fit.intercept + fit.slope * x[i])));
  }
  fit.max_relative_residual = ymax > 0.0 ? rmax / ymax : rmax;
  return fit;
}

DensityScan density_scan(const EITParams& base, const MediumGeometry& geom, const BlockadeParams& blk,
                         double delta_s, std::span<const double> rho_grid) {
  if (rho_grid.empty()) throw UsageError("density_scan: density grid is empty");
  DensityScan scan;
  scan.rows.reserve(rho_grid.size());
  for (double rho : rho_grid) {
    if (!(rho > 0.0)) throw UsageError("density_scan: densities must be positive");
    EITParams p = base;
    p.rho = rho;
    DensityScanRow row;
    row.rho = rho;
    row.phase0 = integrated_phase(p, geom, blk, delta_s, 0).phase;
    row.phase1 = integrated_phase(p, geom, blk, delta_s, 1).phase;
    row.controlled_phase = row.phase1 - row.phase0;
    scan.rows.push_back(row);
  }

  std::vector<double> x, y0, y1, dy;
  for (const auto& r : scan.rows) {
    x.push_back(r.rho);
    y0.push_back(r.phase0);
    y1.push_back(r.phase1);
    dy.push_back(r.controlled_phase);
  }
  scan.phase0_fit = fit_line(x, y0);
  scan.phase1_fit = fit_line(x, y1);
  scan.controlled_fit = fit_line(x, dy);
  return scan;
}

}  // namespace rydeit
