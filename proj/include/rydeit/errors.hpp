#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rydeit {

/// Base of every exception thrown by the library. `exit_code()` is the
/// process status the command-line tool reports for it.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

/// Caller violated a precondition (bad argument, empty grid, r <= 0, ...).
class UsageError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Invalid run configuration. `path()` is the JSON pointer of the offending key.
class ConfigError : public UsageError {
public:
  ConfigError(std::string path, const std::string& what)
      : UsageError(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

/// A numerical procedure failed to reach its tolerance.
class NumericalError : public Error {
public:
  explicit NumericalError(const std::string& what, double achieved_tolerance = 0.0)
      : Error(what), achieved_tolerance_(achieved_tolerance) {}
  double achieved_tolerance() const noexcept { return achieved_tolerance_; }
  int exit_code() const noexcept override { return 3; }

private:
  double achieved_tolerance_;
};

/// transmission_fwhm found no transparency window above the two-level background.
class NoEitFeature : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Least-squares fit hit the iteration cap or stalled. Carries the best point seen.
class NonConvergence : public NumericalError {
public:
  NonConvergence(const std::string& what, std::vector<double> best, int iterations)
      : NumericalError(what), best_(std::move(best)), iterations_(iterations) {}
  const std::vector<double>& best_point() const noexcept { return best_; }
  int iterations() const noexcept { return iterations_; }

private:
  std::vector<double> best_;
  int iterations_;
};

/// J^T J is singular at the optimum: some parameter is not constrained by the data.
class DegenerateParameters : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Not enough Monte Carlo records to form an estimate in some basis.
class InsufficientStatistics : public Error {
public:
  InsufficientStatistics(std::string basis, const std::string& what)
      : Error(what), basis_(std::move(basis)) {}
  const std::string& basis() const noexcept { return basis_; }
  int exit_code() const noexcept override { return 4; }

private:
  std::string basis_;
};

}  // namespace rydeit
