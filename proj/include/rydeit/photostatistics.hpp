#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rydeit/polarization.hpp"

namespace rydeit {

enum class BasisSelection { RoundRobin, Random };

/// Source, loss and storage figures of the counting experiment.
struct ExperimentConfig {
  double mean_photons_control = 0.6;
  double mean_photons_target = 0.9;
  double detection_efficiency = 0.25;
  double storage_retrieval_efficiency_zero_delay = 0.2;
  double storage_retrieval_efficiency_delayed = 0.07;
  double delayed_time = 4.5e-6;  ///< s, time at which the delayed efficiency applies
  double delay = 0.0;            ///< s, storage time used in the simulation
  std::optional<double> storage_probability;  ///< p_store; default sqrt of the zero-delay efficiency
  std::int64_t repetitions = 100000;
  std::uint64_t rng_seed = 0;
  BasisSelection basis_selection = BasisSelection::RoundRobin;

  void validate() const;
  double p_store() const;
  /// Retrieval probability given a stored excitation, at `delay`.
  double p_retrieve() const;
};

/// Decay constant τ of the combined efficiency η(t) = η(0) e^{-t/τ}.
double retrieval_time_constant(const ExperimentConfig& config);

/// Combined storage-and-retrieval efficiency after storage time t.
double retrieval_efficiency(const ExperimentConfig& config, double t);

/// Optical depth and phase of the σ- component with 0 and 1 stored excitations.
struct PhaseTruth {
  double od0 = 0.0;
  double phi0 = 0.0;
  double od1 = 0.0;
  double phi1 = 0.0;
  double sigma_plus_suppression = std::numeric_limits<double>::infinity();
  double coherence0 = 1.0;
  double coherence1 = 1.0;
};

struct ShotRecord {
  Basis basis = Basis::HV;
  bool stored = false;
  bool control_retrieved = false;
  std::uint32_t target_counts_k = 0;
  std::uint32_t target_counts_l = 0;
};

/// SplitMix64. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

private:
  std::uint64_t state_;
};

/// Independent stream for shot `index` of a run seeded with `seed`.
SplitMix64 shot_stream(std::uint64_t seed, std::uint64_t index);

ShotRecord simulate_shot(SplitMix64& rng, const ExperimentConfig& config, const PhaseTruth& truth,
                         const PolarizationState& input, std::uint64_t shot_index);

/// `config.repetitions` shots. The result does not depend on `threads`.
std::vector<ShotRecord> simulate_run(const ExperimentConfig& config, const PhaseTruth& truth,
                                     const PolarizationState& input, unsigned threads = 1);

struct BasisCounts {
  std::uint64_t counts_k = 0;
  std::uint64_t counts_l = 0;
  std::uint64_t records = 0;
};

struct CountSummary {
  std::array<BasisCounts, 3> counts{};
  StokesVector estimate;
  std::array<double, 3> standard_error{};  ///< for s_hv, s_da, s_lr
  std::uint64_t records_used = 0;
  bool postselected = false;

  double azimuth_error() const;
  double visibility_error() const;
};

/// Stokes parameters from summed counts, (N_k - N_l)/(N_k + N_l) per basis,
/// with binomial standard errors. Throws InsufficientStatistics naming the
/// first basis without usable records.
CountSummary estimate_stokes(std::span<const ShotRecord> records, bool postselect);

/// Large-N limit of estimate_stokes for the same configuration.
StokesVector expected_stokes(const ExperimentConfig& config, const PhaseTruth& truth,
                             const PolarizationState& input, bool postselect);

}  // namespace rydeit
