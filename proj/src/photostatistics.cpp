#include "rydeit/photostatistics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "rydeit/errors.hpp"

namespace rydeit {

namespace {

bool probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(std::isfinite(mean_photons_control) && mean_photons_control >= 0.0))
    throw UsageError("ExperimentConfig: mean_photons_control must be >= 0");
  if (!(std::isfinite(mean_photons_target) && mean_photons_target >= 0.0))
    throw UsageError("ExperimentConfig: mean_photons_target must be >= 0");
  if (!probability(detection_efficiency)) throw UsageError("ExperimentConfig: detection_efficiency not in [0, 1]");
  if (!probability(storage_retrieval_efficiency_zero_delay))
    throw UsageError("ExperimentConfig: storage_retrieval_efficiency_zero_delay not in [0, 1]");
  if (!probability(storage_retrieval_efficiency_delayed))
    throw UsageError("ExperimentConfig: storage_retrieval_efficiency_delayed not in [0, 1]");
  if (storage_retrieval_efficiency_delayed > storage_retrieval_efficiency_zero_delay)
    throw UsageError("ExperimentConfig: delayed efficiency exceeds the zero-delay efficiency");
  if (storage_retrieval_efficiency_delayed == 0.0 && storage_retrieval_efficiency_zero_delay > 0.0)
    throw UsageError("ExperimentConfig: delayed efficiency must be > 0");
  if (!(std::isfinite(delayed_time) && delayed_time > 0.0)) throw UsageError("ExperimentConfig: delayed_time must be > 0");
  if (!(std::isfinite(delay) && delay >= 0.0)) throw UsageError("ExperimentConfig: delay must be >= 0");
  if (repetitions < 1) throw UsageError("ExperimentConfig: repetitions must be >= 1");
  if (storage_probability) {
    if (!probability(*storage_probability)) throw UsageError("ExperimentConfig: storage_probability not in [0, 1]");
    if (*storage_probability < storage_retrieval_efficiency_zero_delay)
      throw UsageError("ExperimentConfig: storage_probability below the combined efficiency");
  }
}

double ExperimentConfig::p_store() const {
  return storage_probability.value_or(std::sqrt(storage_retrieval_efficiency_zero_delay));
}

double ExperimentConfig::p_retrieve() const {
  const double ps = p_store();
  return ps > 0.0 ? retrieval_efficiency(*this, delay) / ps : 0.0;
}

double retrieval_time_constant(const ExperimentConfig& c) {
  const double ratio = c.storage_retrieval_efficiency_zero_delay / c.storage_retrieval_efficiency_delayed;
  if (!(ratio > 1.0)) return std::numeric_limits<double>::infinity();
  return c.delayed_time / std::log(ratio);
}

double retrieval_efficiency(const ExperimentConfig& c, double t) {
  if (!(t >= 0.0)) throw UsageError("retrieval_efficiency: t must be >= 0");
  const double tau = retrieval_time_constant(c);
  if (std::isinf(tau)) return c.storage_retrieval_efficiency_zero_delay;
  return c.storage_retrieval_efficiency_zero_delay * std::exp(-t / tau);
}

SplitMix64::result_type SplitMix64::operator()() {
  state_ += kGolden;
  return mix64(state_);
}

SplitMix64 shot_stream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(mix64(seed ^ mix64(index + kGolden)));
}

ShotRecord simulate_shot(SplitMix64& rng, const ExperimentConfig& config, const PhaseTruth& truth,
                         const PolarizationState& input, std::uint64_t shot_index) {
  ShotRecord rec;
  if (config.basis_selection == BasisSelection::RoundRobin) {
    rec.basis = static_cast<Basis>(shot_index % 3);
  } else {
    rec.basis = static_cast<Basis>(std::uniform_int_distribution<int>(0, 2)(rng));
  }

  // Poisson number of control photons, each stored with probability p_store;
  // blockade admits at most one stored excitation.
  const double p_stored = -std::expm1(-config.mean_photons_control * config.p_store());
  rec.stored = std::bernoulli_distribution(p_stored)(rng);
  if (rec.stored) rec.control_retrieved = std::bernoulli_distribution(config.p_retrieve())(rng);

  const double od = rec.stored ? truth.od1 : truth.od0;
  const double phi = rec.stored ? truth.phi1 : truth.phi0;
  const double coherence = rec.stored ? truth.coherence1 : truth.coherence0;
  const PolarizationState out = apply_medium(input, od, phi, truth.sigma_plus_suppression);

  // Coherent target light: each analyzer port sees independent Poisson
  // counts, thinned by transmission and detection efficiency.
  const double mean = config.mean_photons_target * config.detection_efficiency * out.power();
  if (mean > 0.0) {
    const auto [pk, pl] = basis_powers(stokes(out, coherence), rec.basis);
    if (mean * pk > 0.0) rec.target_counts_k = std::poisson_distribution<std::uint32_t>(mean * pk)(rng);
    if (mean * pl > 0.0) rec.target_counts_l = std::poisson_distribution<std::uint32_t>(mean * pl)(rng);
  }
  return rec;
}

std::vector<ShotRecord> simulate_run(const ExperimentConfig& config, const PhaseTruth& truth,
                                     const PolarizationState& input, unsigned threads) {
  config.validate();
  const PolarizationState in = input.normalized();
  const auto n = static_cast<std::uint64_t>(config.repetitions);
  std::vector<ShotRecord> records(n);

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      SplitMix64 rng = shot_stream(config.rng_seed, i);
      records[i] = simulate_shot(rng, config, truth, in, i);
    }
  };

  threads = std::max(1U, threads);
  if (threads == 1 || n < 2 * threads) {
    work(0, n);
    return records;
  }
  {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t begin = t * chunk;
      const std::uint64_t end = std::min(n, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
  }
  return records;
}

double CountSummary::azimuth_error() const {
  const double x = estimate.s_hv;
  const double y = estimate.s_da;
  const double r2 = x * x + y * y;
  if (!(r2 > 0.0)) return std::numeric_limits<double>::infinity();
  return std::hypot(x * standard_error[1], y * standard_error[0]) / r2;
}

double CountSummary::visibility_error() const {
  const double v = visibility(estimate);
  if (!(v > 0.0)) return std::hypot(standard_error[0], standard_error[1]);
  return std::hypot(estimate.s_hv * standard_error[0], estimate.s_da * standard_error[1]) / v;
}

CountSummary estimate_stokes(std::span<const ShotRecord> records, bool postselect) {
  CountSummary summary;
  summary.postselected = postselect;
  for (const ShotRecord& r : records) {
    if (postselect && !r.control_retrieved) continue;
    BasisCounts& c = summary.counts[static_cast<std::size_t>(r.basis)];
    c.counts_k += r.target_counts_k;
    c.counts_l += r.target_counts_l;
    ++c.records;
    ++summary.records_used;
  }

  std::array<double, 3> s{};
  for (std::size_t b = 0; b < 3; ++b) {
    const BasisCounts& c = summary.counts[b];
    const std::string name{basis_name(static_cast<Basis>(b))};
    if (c.records == 0)
      throw InsufficientStatistics(name, "estimate_stokes: no records in basis " + name +
                                             (postselect ? " after postselection" : ""));
    const double total = static_cast<double>(c.counts_k + c.counts_l);
    if (total == 0.0) throw InsufficientStatistics(name, "estimate_stokes: no target counts in basis " + name);
    s[b] = (static_cast<double>(c.counts_k) - static_cast<double>(c.counts_l)) / total;
    summary.standard_error[b] = std::sqrt(std::max(0.0, 1.0 - s[b] * s[b]) / total);
  }
  summary.estimate = {s[0], s[1], s[2]};
  return summary;
}

StokesVector expected_stokes(const ExperimentConfig& config, const PhaseTruth& truth,
                             const PolarizationState& input, bool postselect) {
  config.validate();
  const PolarizationState in = input.normalized();
  const PolarizationState out0 = apply_medium(in, truth.od0, truth.phi0, truth.sigma_plus_suppression);
  const PolarizationState out1 = apply_medium(in, truth.od1, truth.phi1, truth.sigma_plus_suppression);
  if (postselect) return stokes(out1, truth.coherence1);

  // Count-weighted mixture of the two branches.
  const double p1 = -std::expm1(-config.mean_photons_control * config.p_store());
  const double w0 = (1.0 - p1) * out0.power();
  const double w1 = p1 * out1.power();
  const StokesVector s0 = stokes(out0, truth.coherence0);
  const StokesVector s1 = stokes(out1, truth.coherence1);
  const double w = w0 + w1;
  return {(w0 * s0.s_hv + w1 * s1.s_hv) / w, (w0 * s0.s_da + w1 * s1.s_da) / w, (w0 * s0.s_lr + w1 * s1.s_lr) / w};
}

}  // namespace rydeit
