#pragma once

#include <numbers>

namespace rydeit {

// CODATA 2018 recommended values.
namespace codata {
inline constexpr double hbar = 1.054571817e-34;          // J s (exact)
inline constexpr double epsilon0 = 8.8541878128e-12;     // F/m
inline constexpr double bohr_radius = 5.29177210903e-11; // m
inline constexpr double hartree = 4.3597447222071e-18;   // J
inline constexpr double speed_of_light = 299792458.0;    // m/s (exact)
}  // namespace codata

/// Vacuum wavelength of the Rb D2 line (5S1/2 -> 5P3/2).
inline constexpr double rb_d2_wavelength = 780.241209686e-9;  // m

struct PhysicalConstants {
  double hbar = codata::hbar;
  double epsilon0 = codata::epsilon0;
  double bohr_radius = codata::bohr_radius;
  double hartree = codata::hartree;
  double c6_atomic_unit = codata::hartree * (codata::bohr_radius * codata::bohr_radius * codata::bohr_radius) *
                          (codata::bohr_radius * codata::bohr_radius * codata::bohr_radius);
  double signal_wavelength = rb_d2_wavelength;
  double k_s = 2.0 * std::numbers::pi / rb_d2_wavelength;

  static PhysicalConstants for_wavelength(double wavelength);
};

/// C6 in J m^6 from a value in atomic units (hartree * a0^6).
double c6_from_atomic_units(double c6_au);

/// 2 pi f 1e6: frequency in MHz to angular frequency in rad/s.
constexpr double angular_from_mhz(double f_mhz) { return 2.0 * std::numbers::pi * f_mhz * 1e6; }

constexpr double mhz_from_angular(double omega) { return omega / (2.0 * std::numbers::pi * 1e6); }

}  // namespace rydeit
