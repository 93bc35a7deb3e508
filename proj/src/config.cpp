#include "rydeit/config.hpp"

#include <cmath>
#include <functional>
#include <set>

#include "rydeit/constants.hpp"
#include "rydeit/errors.hpp"

namespace rydeit {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were consumed so that
// finish() can reject the rest.
class Reader {
public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
  }

  std::string key_path(const std::string& key) const { return path_ + "/" + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out, const std::function<bool(double)>& ok = {},
              const char* requirement = "") {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(key_path(key), "expected a number");
      out = v->get<double>();
      check(key, out, ok, requirement);
    }
  }

  void optional_number(const std::string& key, std::optional<double>& out,
                       const std::function<bool(double)>& ok = {}, const char* requirement = "") {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      if (!v->is_number()) throw ConfigError(key_path(key), "expected a number or null");
      out = v->get<double>();
      check(key, *out, ok, requirement);
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out, long long min_value) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(key_path(key), "expected an integer");
      const auto x = v->get<long long>();
      if (x < min_value) throw ConfigError(key_path(key), "must be >= " + std::to_string(min_value));
      out = static_cast<Int>(x);
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(key_path(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out, const std::set<std::string>& allowed) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(key_path(key), "expected a string");
      out = v->get<std::string>();
      if (!allowed.contains(out)) throw ConfigError(key_path(key), "unsupported value '" + out + "'");
    }
  }

  template <typename F>
  void section(const std::string& key, F&& body) {
    if (const json* v = find(key)) {
      Reader child(*v, key_path(key));
      body(child);
      child.finish();
    }
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!seen_.contains(it.key())) throw ConfigError(key_path(it.key()), "unknown key");
  }

private:
  void check(const std::string& key, double x, const std::function<bool(double)>& ok, const char* requirement) const {
    if (!std::isfinite(x)) throw ConfigError(key_path(key), "must be finite");
    if (ok && !ok(x)) throw ConfigError(key_path(key), std::string("must be ") + requirement);
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

bool positive(double x) { return x > 0.0; }
bool non_negative(double x) { return x >= 0.0; }
bool unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

RunConfig parse_config(const json& doc) {
  RunConfig c;
  Reader root(doc, "");

  root.section("eit", [&](Reader& r) {
    r.number("excited_lifetime_ns", c.eit.excited_lifetime_ns, positive, "> 0");
    r.number("gamma_rg_mhz", c.eit.gamma_rg_mhz, non_negative, ">= 0");
    r.number("omega_c_mhz", c.eit.omega_c_mhz, non_negative, ">= 0");
    r.number("delta_c_mhz", c.eit.delta_c_mhz);
    r.number("density_per_cm3", c.eit.density_per_cm3, non_negative, ">= 0");
    r.number("dipole_moment_cm", c.eit.dipole_moment_cm, positive, "> 0");
  });
  root.section("geometry", [&](Reader& r) {
    r.number("length_um", c.geometry.length_um, positive, "> 0");
    r.number("signal_wavelength_nm", c.geometry.signal_wavelength_nm, positive, "> 0");
  });
  root.section("blockade", [&](Reader& r) {
    r.number("c6_au", c.blockade.c6_au);
    r.optional_number("excitation_z_um", c.blockade.excitation_z_um, non_negative, ">= 0");
    r.boolean("sign_reversed", c.blockade.sign_reversed);
    r.optional_number("delta_t_mhz", c.blockade.delta_t_mhz, positive, "> 0");
  });
  root.section("operating_point", [&](Reader& r) { r.number("delta_s_mhz", c.operating_delta_s_mhz); });
  root.section("spectrum_grid", [&](Reader& r) {
    r.number("min_mhz", c.spectrum_grid.min_mhz);
    r.number("max_mhz", c.spectrum_grid.max_mhz);
    r.integer("points", c.spectrum_grid.points, 1);
  });
  root.section("density_scan", [&](Reader& r) {
    if (const json* v = r.find("density_per_cm3")) {
      const std::string path = r.key_path("density_per_cm3");
      if (!v->is_array() || v->empty()) throw ConfigError(path, "expected a non-empty array of numbers");
      c.density_scan_per_cm3.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const json& x = (*v)[i];
        if (!x.is_number() || !(x.get<double>() > 0.0))
          throw ConfigError(path + "/" + std::to_string(i), "expected a positive number");
        c.density_scan_per_cm3.push_back(x.get<double>());
      }
    }
  });
  root.section("polarization", [&](Reader& r) {
    r.number("sigma_plus_suppression", c.polarization.sigma_plus_suppression, positive, "> 0");
    r.optional_number("amplitude_ratio", c.polarization.amplitude_ratio, positive, "> 0");
    r.number("coherence_stored", c.polarization.coherence_stored, unit_interval, "in [0, 1]");
    r.number("coherence_empty", c.polarization.coherence_empty, unit_interval, "in [0, 1]");
  });
  root.section("experiment", [&](Reader& r) {
    auto& e = c.experiment;
    r.number("mean_photons_control", e.mean_photons_control, non_negative, ">= 0");
    r.number("mean_photons_target", e.mean_photons_target, non_negative, ">= 0");
    r.number("detection_efficiency", e.detection_efficiency, unit_interval, "in [0, 1]");
    r.number("storage_retrieval_efficiency_zero_delay", e.storage_retrieval_efficiency_zero_delay, unit_interval,
             "in [0, 1]");
    r.number("storage_retrieval_efficiency_delayed", e.storage_retrieval_efficiency_delayed, unit_interval,
             "in [0, 1]");
    r.number("delayed_time_us", e.delayed_time_us, positive, "> 0");
    r.number("delay_us", e.delay_us, non_negative, ">= 0");
    r.optional_number("storage_probability", e.storage_probability, unit_interval, "in [0, 1]");
    r.integer("repetitions", e.repetitions, 0);
    r.string("basis_selection", e.basis_selection, {"round_robin", "random"});
    r.integer("threads", e.threads, 1);
  });
  root.section("fit", [&](Reader& r) {
    r.section("initial", [&](Reader& i) {
      i.number("od_resonant", c.fit.od_resonant, positive, "> 0");
      i.number("omega_c_mhz", c.fit.omega_c_mhz, positive, "> 0");
      i.number("gamma_rg_mhz", c.fit.gamma_rg_mhz, positive, "> 0");
      i.number("delta_c_mhz", c.fit.delta_c_mhz);
    });
    r.boolean("fit_phase", c.fit.fit_phase);
    r.boolean("omega_squared", c.fit.omega_squared);
    r.integer("max_iterations", c.fit.max_iterations, 1);
  });
  root.section("retrieval", [&](Reader& r) {
    r.number("max_time_us", c.retrieval.max_time_us, positive, "> 0");
    r.integer("points", c.retrieval.points, 2);
  });
  if (const json* v = root.find("seed")) {
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
      throw ConfigError("/seed", "expected a non-negative integer");
    c.seed = v->get<std::uint64_t>();
  }
  root.finish();

  // Cross-field checks.
  if (c.spectrum_grid.points > 1 && !(c.spectrum_grid.max_mhz > c.spectrum_grid.min_mhz))
    throw ConfigError("/spectrum_grid/max_mhz", "must exceed min_mhz");
  if (c.blockade.excitation_z_um && *c.blockade.excitation_z_um > c.geometry.length_um)
    throw ConfigError("/blockade/excitation_z_um", "must lie within [0, length_um]");
  const auto& e = c.experiment;
  if (e.storage_retrieval_efficiency_delayed > e.storage_retrieval_efficiency_zero_delay)
    throw ConfigError("/experiment/storage_retrieval_efficiency_delayed", "must not exceed the zero-delay efficiency");
  if (e.storage_retrieval_efficiency_delayed == 0.0 && e.storage_retrieval_efficiency_zero_delay > 0.0)
    throw ConfigError("/experiment/storage_retrieval_efficiency_delayed", "must be > 0");
  if (e.storage_probability && *e.storage_probability < e.storage_retrieval_efficiency_zero_delay)
    throw ConfigError("/experiment/storage_probability", "must be >= storage_retrieval_efficiency_zero_delay");
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["eit"] = {{"excited_lifetime_ns", c.eit.excited_lifetime_ns},
              {"gamma_rg_mhz", c.eit.gamma_rg_mhz},
              {"omega_c_mhz", c.eit.omega_c_mhz},
              {"delta_c_mhz", c.eit.delta_c_mhz},
              {"density_per_cm3", c.eit.density_per_cm3},
              {"dipole_moment_cm", c.eit.dipole_moment_cm}};
  j["geometry"] = {{"length_um", c.geometry.length_um}, {"signal_wavelength_nm", c.geometry.signal_wavelength_nm}};
  j["blockade"] = {{"c6_au", c.blockade.c6_au},
                   {"excitation_z_um", optional_json(c.blockade.excitation_z_um)},
                   {"sign_reversed", c.blockade.sign_reversed},
                   {"delta_t_mhz", optional_json(c.blockade.delta_t_mhz)}};
  j["operating_point"] = {{"delta_s_mhz", c.operating_delta_s_mhz}};
  j["spectrum_grid"] = {
      {"min_mhz", c.spectrum_grid.min_mhz}, {"max_mhz", c.spectrum_grid.max_mhz}, {"points", c.spectrum_grid.points}};
  j["density_scan"] = {{"density_per_cm3", c.density_scan_per_cm3}};
  j["polarization"] = {{"sigma_plus_suppression", c.polarization.sigma_plus_suppression},
                       {"amplitude_ratio", optional_json(c.polarization.amplitude_ratio)},
                       {"coherence_stored", c.polarization.coherence_stored},
                       {"coherence_empty", c.polarization.coherence_empty}};
  const auto& e = c.experiment;
  j["experiment"] = {{"mean_photons_control", e.mean_photons_control},
                     {"mean_photons_target", e.mean_photons_target},
                     {"detection_efficiency", e.detection_efficiency},
                     {"storage_retrieval_efficiency_zero_delay", e.storage_retrieval_efficiency_zero_delay},
                     {"storage_retrieval_efficiency_delayed", e.storage_retrieval_efficiency_delayed},
                     {"delayed_time_us", e.delayed_time_us},
                     {"delay_us", e.delay_us},
                     {"storage_probability", optional_json(e.storage_probability)},
                     {"repetitions", e.repetitions},
                     {"basis_selection", e.basis_selection},
                     {"threads", e.threads}};
  j["fit"] = {{"initial",
               {{"od_resonant", c.fit.od_resonant},
                {"omega_c_mhz", c.fit.omega_c_mhz},
                {"gamma_rg_mhz", c.fit.gamma_rg_mhz},
                {"delta_c_mhz", c.fit.delta_c_mhz}}},
              {"fit_phase", c.fit.fit_phase},
              {"omega_squared", c.fit.omega_squared},
              {"max_iterations", c.fit.max_iterations}};
  j["retrieval"] = {{"max_time_us", c.retrieval.max_time_us}, {"points", c.retrieval.points}};
  j["seed"] = c.seed;
  return j;
}

EITParams RunConfig::to_eit() const {
  EITParams p;
  p.gamma_e = 1.0 / (eit.excited_lifetime_ns * 1e-9);
  p.gamma_rg = angular_from_mhz(eit.gamma_rg_mhz);
  p.omega_c = angular_from_mhz(eit.omega_c_mhz);
  p.delta_c = angular_from_mhz(eit.delta_c_mhz);
  p.rho = eit.density_per_cm3 * 1e6;
  p.d_eg = eit.dipole_moment_cm;
  return p;
}

MediumGeometry RunConfig::to_geometry() const {
  return {geometry.length_um * 1e-6, PhysicalConstants::for_wavelength(geometry.signal_wavelength_nm * 1e-9).k_s};
}

BlockadeParams RunConfig::to_blockade() const {
  BlockadeParams b;
  b.c6 = c6_from_atomic_units(blockade.c6_au);
  if (blockade.excitation_z_um) b.excitation_z = *blockade.excitation_z_um * 1e-6;
  b.sign_reversed = blockade.sign_reversed;
  return b;
}

ExperimentConfig RunConfig::to_experiment() const {
  ExperimentConfig x;
  x.mean_photons_control = experiment.mean_photons_control;
  x.mean_photons_target = experiment.mean_photons_target;
  x.detection_efficiency = experiment.detection_efficiency;
  x.storage_retrieval_efficiency_zero_delay = experiment.storage_retrieval_efficiency_zero_delay;
  x.storage_retrieval_efficiency_delayed = experiment.storage_retrieval_efficiency_delayed;
  x.delayed_time = experiment.delayed_time_us * 1e-6;
  x.delay = experiment.delay_us * 1e-6;
  x.storage_probability = experiment.storage_probability;
  x.repetitions = experiment.repetitions;
  x.rng_seed = seed;
  x.basis_selection = experiment.basis_selection == "random" ? BasisSelection::Random : BasisSelection::RoundRobin;
  return x;
}

SpectrumModel RunConfig::to_spectrum_model() const {
  const EITParams p = to_eit();
  return {p.gamma_e, p.d_eg, to_geometry()};
}

ModelParameters RunConfig::fit_initial() const {
  return {fit.od_resonant, angular_from_mhz(fit.omega_c_mhz), angular_from_mhz(fit.gamma_rg_mhz),
          angular_from_mhz(fit.delta_c_mhz)};
}

double RunConfig::operating_delta_s() const { return angular_from_mhz(operating_delta_s_mhz); }

std::vector<double> RunConfig::spectrum_grid_mhz() const {
  const int n = spectrum_grid.points;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    grid.push_back(spectrum_grid.min_mhz);
    return grid;
  }
  const double step = (spectrum_grid.max_mhz - spectrum_grid.min_mhz) / (n - 1);
  for (int i = 0; i < n; ++i) grid.push_back(spectrum_grid.min_mhz + i * step);
  return grid;
}

std::vector<double> RunConfig::spectrum_detunings() const {
  std::vector<double> grid = spectrum_grid_mhz();
  for (double& x : grid) x = angular_from_mhz(x);
  return grid;
}

}  // namespace rydeit
