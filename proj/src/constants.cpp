#include "rydeit/constants.hpp"

#include <cmath>

#include "rydeit/errors.hpp"

namespace rydeit {

PhysicalConstants PhysicalConstants::for_wavelength(double wavelength) {
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw UsageError("signal wavelength must be positive and finite");
  PhysicalConstants pc;
  pc.signal_wavelength = wavelength;
  pc.k_s = 2.0 * std::numbers::pi / wavelength;
  return pc;
}

double c6_from_atomic_units(double c6_au) {
  static const PhysicalConstants pc;
  return c6_au * pc.c6_atomic_unit;
}

}  // namespace rydeit
