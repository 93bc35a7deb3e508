#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "rydeit/errors.hpp"
#include "rydeit/susceptibility.hpp"
#include "support.hpp"

using namespace rydeit;
using rydeit::testing::Golden;
using rydeit::testing::linspace;
using rydeit::testing::mhz;
using rydeit::testing::relative_error;

namespace {

// Rb87 numbers shared by the hand-evaluated golden values below.
EITParams reference_params() {
  EITParams p;
  p.gamma_e = 1.0 / 26e-9;
  p.gamma_rg = mhz(0.1);
  p.omega_c = mhz(18.0);
  p.delta_c = 0.0;
  p.rho = 1.8e18;
  p.d_eg = 2.534e-29;
  return p;
}

// Principal-value Hilbert transform of Im χ on a uniform midpoint grid
// centred on x, with the singularity subtracted:
//   Re χ(x) = (1/π) [ ∫ (Im χ(y) - Im χ(x)) / (y - x) dy + Im χ(x) ln((M - x)/(M + x)) ]
// over y ∈ [-M, M]. Written independently of the library's quadrature.
double kramers_kronig_real(const EITParams& p, double x, double m, double h) {
  const double fx = chi(p, x).imag();
  double sum = 0.0;
  const auto left = static_cast<long>(std::floor((x + m) / h));
  const auto right = static_cast<long>(std::floor((m - x) / h));
  for (long k = -left; k < right; ++k) {
    const double y = x + (static_cast<double>(k) + 0.5) * h;
    sum += (chi(p, y).imag() - fx) / (y - x);
  }
  sum *= h;
  // The grid covers [x - left h, x + right h]; the log term uses those limits.
  const double a = x - static_cast<double>(left) * h;
  const double b = x + static_cast<double>(right) * h;
  return (sum + fx * std::log((b - x) / (x - a))) / std::numbers::pi;
}

}  // namespace

TEST_CASE("chi0 golden value") {
  // 2 ρ d² / (ε0 ħ Γe) at 40 digits.
  CHECK(relative_error(chi0(reference_params()), 0.064367135022858280466) < 1e-14);

  EITParams p = reference_params();
  p.rho = 0.0;
  CHECK(chi0(p) == 0.0);
  p.rho = 3.6e18;
  CHECK(chi0(p) == doctest::Approx(2.0 * chi0(reference_params())).epsilon(1e-15));
}

TEST_CASE("chi golden value at a typical operating point") {
  const std::complex<double> c = chi(reference_params(), mhz(-10.0));
  CHECK(relative_error(c.real(), 0.028299948822670936362) < 1e-12);
  CHECK(relative_error(c.imag(), 0.046186119625098900644) < 1e-12);
}

TEST_CASE("two-level limit") {
  EITParams p = reference_params();
  p.omega_c = 0.0;
  CHECK(chi(p, 0.0).real() == 0.0);
  CHECK(relative_error(chi(p, 0.0).imag(), chi0(p)) < 1e-15);

  for (double f : linspace(-200.0, 200.0, 41)) {
    const double ds = mhz(f);
    const std::complex<double> want =
        std::complex<double>(0.0, chi0(p) * p.gamma_e) / std::complex<double>(p.gamma_e, -2.0 * ds);
    CHECK(std::abs(chi(p, ds) - want) <= 1e-15 * chi0(p));
  }
}

TEST_CASE("exact EIT point returns zero and is flagged") {
  EITParams p = reference_params();
  p.gamma_rg = 0.0;
  p.delta_c = mhz(7.0);
  const ChiPoint pt = evaluate_chi(p, -p.delta_c);
  CHECK(pt.exact_eit);
  CHECK(pt.value == std::complex<double>(0.0, 0.0));
  CHECK_FALSE(evaluate_chi(p, -p.delta_c + mhz(0.01)).exact_eit);

  const MediumGeometry g{61e-6, 8052875.48};
  const Propagation prop = od_and_phase(pt.value, g);
  CHECK(prop.od == 0.0);
  CHECK(prop.phase == 0.0);
  CHECK(prop.transmission() == 1.0);
}

TEST_CASE("passivity on a randomized grid") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> det(-100.0, 100.0);
  std::uniform_real_distribution<double> rabi(0.0, 50.0);
  std::uniform_real_distribution<double> deph(0.0, 5.0);
  EITParams p = reference_params();
  for (int i = 0; i < 20000; ++i) {
    p.omega_c = mhz(rabi(rng));
    p.delta_c = mhz(det(rng));
    p.gamma_rg = i % 10 == 0 ? 0.0 : mhz(deph(rng));
    CHECK_MESSAGE(chi(p, mhz(det(rng))).imag() >= -1e-15 * chi0(p), "sample ", i);
  }
}

TEST_CASE("large-detuning decay") {
  const EITParams p = reference_params();
  CHECK(std::abs(chi(p, mhz(1e4))) < 1e-3 * chi0(p));
  CHECK(std::abs(chi(p, mhz(-1e4))) < 1e-3 * chi0(p));
}

TEST_CASE("chi is linear in density") {
  EITParams a = Golden{}.eit;
  EITParams b = a;
  b.rho = 3.0 * a.rho;
  for (double f : linspace(-30.0, 30.0, 61)) {
    const std::complex<double> ca = chi(a, mhz(f));
    const std::complex<double> cb = chi(b, mhz(f));
    CHECK(std::abs(cb - 3.0 * ca) <= 1e-15 * std::abs(cb) + 1e-300);
  }
}

TEST_CASE("Kramers-Kronig reconstruction of the dispersion at the operating point") {
  const Golden g;
  const double x = g.delta_s;
  const double m = 500.0 * g.eit.gamma_e;
  const double re = kramers_kronig_real(g.eit, x, m, mhz(0.002));
  const double want = chi(g.eit, x).real();
  CHECK(relative_error(re, want) < 0.02);
}

TEST_CASE("od_and_phase") {
  const MediumGeometry g{61e-6, 8052875.48};
  const Propagation zero = od_and_phase({0.0, 0.0}, g);
  CHECK(zero.od == 0.0);
  CHECK(zero.phase == 0.0);

  const Propagation absorb = od_and_phase({0.0, 0.3}, g);
  CHECK(absorb.od == doctest::Approx(g.k_s * g.length * 0.3));
  CHECK(absorb.phase == 0.0);

  const MediumGeometry g2{2.0 * g.length, g.k_s};
  const Propagation a = od_and_phase({0.1, 0.2}, g);
  const Propagation b = od_and_phase({0.1, 0.2}, g2);
  CHECK(b.od == doctest::Approx(2.0 * a.od));
  CHECK(b.phase == doctest::Approx(2.0 * a.phase));

  CHECK(Propagation{800.0, 0.0}.transmission() == 0.0);
}

TEST_CASE("spectrum") {
  const Golden g;
  SUBCASE("two-level parity") {
    const EITParams bare = g.eit.two_level();
    const auto grid = linspace(mhz(-30.0), mhz(30.0), 121);
    const auto rows = spectrum(bare, g.geom, grid);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& mirror = rows[rows.size() - 1 - i];
      CHECK(rows[i].transmission == doctest::Approx(mirror.transmission).epsilon(1e-12));
      CHECK(rows[i].phase == doctest::Approx(-mirror.phase).epsilon(1e-12));
    }
  }
  SUBCASE("exact EIT at resonance") {
    EITParams p = g.eit;
    p.gamma_rg = 0.0;
    p.delta_c = 0.0;
    const std::vector<double> grid{mhz(-1.0), 0.0, mhz(1.0)};
    CHECK(spectrum(p, g.geom, grid)[1].transmission == 1.0);
  }
  SUBCASE("rows match chi and od_and_phase") {
    const auto grid = linspace(mhz(-30.0), mhz(30.0), 7);
    const auto rows = spectrum(g.eit, g.geom, grid);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Propagation prop = od_and_phase(chi(g.eit, grid[i]), g.geom);
      CHECK(rows[i].delta_s == grid[i]);
      CHECK(rows[i].transmission == std::exp(-prop.od));
      CHECK(rows[i].phase == prop.phase);
    }
  }
  SUBCASE("grid errors") {
    CHECK_THROWS_AS(spectrum(g.eit, g.geom, std::vector<double>{}), UsageError);
    CHECK_THROWS_AS(spectrum(g.eit, g.geom, std::vector<double>{1.0, 1.0}), UsageError);
    CHECK(spectrum(g.eit, g.geom, std::vector<double>{0.0}).size() == 1);
  }
}

namespace {

// Dense-grid brute force: half-height width of T_EIT - T_two-level.
double brute_force_fwhm(const EITParams& p, const MediumGeometry& g) {
  const EITParams bare = p.two_level();
  const double span = 4.0 * std::max(p.omega_c, p.gamma_e);
  const int n = 400001;
  std::vector<double> x(n), h(n);
  std::size_t peak = 0;
  for (int i = 0; i < n; ++i) {
    x[i] = -p.delta_c - span + 2.0 * span * i / (n - 1);
    h[i] = std::exp(-od_and_phase(chi(p, x[i]), g).od) - std::exp(-od_and_phase(chi(bare, x[i]), g).od);
    if (h[i] > h[peak]) peak = static_cast<std::size_t>(i);
  }
  const double half = 0.5 * h[peak];
  std::size_t lo = peak, hi = peak;
  while (lo > 0 && h[lo] > half) --lo;
  while (hi + 1 < x.size() && h[hi] > half) ++hi;
  auto cross = [&](std::size_t a, std::size_t b) { return x[a] + (half - h[a]) * (x[b] - x[a]) / (h[b] - h[a]); };
  return cross(hi - 1, hi) - cross(lo, lo + 1);
}

}  // namespace

TEST_CASE("transmission FWHM against a brute-force scan") {
  const Golden g;
  double previous = 0.0;
  for (double om : {8.0, 11.75, 16.0}) {
    EITParams p = g.eit;
    p.omega_c = mhz(om);
    const double w = transmission_fwhm(p, g.geom);
    CHECK(relative_error(w, brute_force_fwhm(p, g.geom)) < 1e-3);
    CHECK(w > previous);
    previous = w;
  }
}

TEST_CASE("default parameters give a 3.7 MHz window") {
  const Golden g;
  CHECK(mhz_from_angular(transmission_fwhm(g.eit, g.geom)) == doctest::Approx(3.7).epsilon(0.02));
}

TEST_CASE("no EIT feature") {
  EITParams p = Golden{}.eit;
  p.omega_c = 0.0;
  CHECK_THROWS_AS(transmission_fwhm(p, Golden{}.geom), NoEitFeature);
  try {
    transmission_fwhm(p, Golden{}.geom);
  } catch (const Error& e) {
    CHECK(e.exit_code() == 3);
  }
}

TEST_CASE("parameter validation") {
  EITParams p = Golden{}.eit;
  p.gamma_rg = -1.0;
  CHECK_THROWS_AS(p.validate(), UsageError);
  p = Golden{}.eit;
  p.gamma_e = 0.0;
  CHECK_THROWS_AS(p.validate(), UsageError);
  CHECK_THROWS_AS((MediumGeometry{0.0, 1.0}.validate()), UsageError);
}
