#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "rydeit/commands.hpp"
#include "rydeit/config.hpp"
#include "rydeit/csv.hpp"
#include "rydeit/errors.hpp"
#include "support.hpp"

using namespace rydeit;
using nlohmann::json;

namespace {

std::string config_error_path(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    CHECK(e.exit_code() == 2);
    return e.path();
  }
  return "<accepted>";
}

const OutputFile& file(const CommandResult& r, const std::string& name) {
  for (const auto& f : r.files)
    if (f.name == name) return f;
  FAIL("missing output file ", name);
  throw 0;
}

}  // namespace

TEST_CASE("empty document gives the defaults") {
  const RunConfig c = parse_config_text("{}");
  CHECK(c.eit.omega_c_mhz == 11.75);
  CHECK(c.geometry.length_um == 61.0);
  CHECK(c.blockade.c6_au == 2.3e23);
  CHECK(c.operating_delta_s_mhz == -10.0);
  CHECK(c.experiment.mean_photons_control == 0.6);
  CHECK(c.experiment.mean_photons_target == 0.9);
  CHECK(c.experiment.detection_efficiency == 0.25);
  CHECK(c.experiment.storage_retrieval_efficiency_zero_delay == 0.2);
  CHECK(c.experiment.storage_retrieval_efficiency_delayed == 0.07);
  CHECK(c.polarization.sigma_plus_suppression == 15.0);
}

TEST_CASE("resolved config round-trips through JSON") {
  RunConfig c = parse_config_text(R"({"eit": {"omega_c_mhz": 9.5}, "blockade": {"excitation_z_um": 12.0},
                                      "experiment": {"storage_probability": 0.5}, "seed": 7})");
  const json once = to_json(c);
  const json twice = to_json(parse_config(once));
  CHECK(once == twice);
  CHECK(once["eit"]["omega_c_mhz"] == 9.5);
  CHECK(once["blockade"]["excitation_z_um"] == 12.0);
  CHECK(once["seed"] == 7);
}

TEST_CASE("schema errors carry the offending path") {
  CHECK(config_error_path(R"({"bogus": 1})") == "/bogus");
  CHECK(config_error_path(R"({"eit": {"omega_c": 1}})") == "/eit/omega_c");
  CHECK(config_error_path(R"({"eit": {"omega_c_mhz": "fast"}})") == "/eit/omega_c_mhz");
  CHECK(config_error_path(R"({"eit": {"gamma_rg_mhz": -1}})") == "/eit/gamma_rg_mhz");
  CHECK(config_error_path(R"({"experiment": {"detection_efficiency": 2}})") == "/experiment/detection_efficiency");
  CHECK(config_error_path(R"({"experiment": {"basis_selection": "diagonal"}})") == "/experiment/basis_selection");
  CHECK(config_error_path(R"({"spectrum_grid": {"points": 0}})") == "/spectrum_grid/points");
  CHECK(config_error_path(R"({"density_scan": {"density_per_cm3": [1e12, -1]}})") == "/density_scan/density_per_cm3/1");
  CHECK(config_error_path(R"({"eit": 3})") == "/eit");
  CHECK(config_error_path("{not json") == "/");
  CHECK(config_error_path("[]") == "/");
}

TEST_CASE("csv formatting and parsing") {
  CHECK(csv::format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(csv::format_double(1.0 / 3.0)) == 1.0 / 3.0);

  csv::Table t({"a", "b"});
  t.add_row({1.0, 0.5});
  CHECK(t.str() == "a,b\n1,0.5\n");

  const csv::ParsedTable p = csv::parse("# comment\na,b\n\n1,2\n3,4\n");
  CHECK(p.column("b") == 1);
  CHECK(p.column("c") == -1);
  REQUIRE(p.rows.size() == 2);
  CHECK(p.rows[1][0] == 3.0);
  CHECK_THROWS_AS(csv::parse("a,b\n1\n"), UsageError);
  CHECK_THROWS_AS(csv::parse("a,b\n1,x\n"), UsageError);
  CHECK_THROWS_AS(csv::parse(""), UsageError);
}

TEST_CASE("every summary carries provenance") {
  RunConfig c;
  c.experiment.repetitions = 3000;
  c.density_scan_per_cm3 = {1e12, 1.8e12};
  for (const auto& name : command_names()) {
    if (name == "fit") continue;
    const CommandResult r = run_command(name, c);
    CHECK(r.summary["tool"] == "rydeit");
    CHECK(r.summary["version"] == RYDEIT_VERSION);
    CHECK(r.summary["command"] == name);
    CHECK(r.summary["config_echo"] == to_json(c));
    for (const auto& f : r.files) CHECK(f.content.find('\n') != std::string::npos);
  }
  CHECK_THROWS_AS(run_command("nonsense", c), UsageError);
}

TEST_CASE("spectrum command") {
  RunConfig c;
  const CommandResult r = cmd_spectrum(c);
  const csv::ParsedTable t = csv::parse(file(r, "spectrum.csv").content);
  CHECK(t.header == std::vector<std::string>{"delta_s_mhz", "transmission_eit", "phase_eit_rad",
                                             "transmission_two_level", "phase_two_level_rad"});
  CHECK(t.rows.size() == 601);
  CHECK(r.summary["delta_t_mhz"].get<double>() == doctest::Approx(3.7).epsilon(0.02));
  CHECK(r.summary["operating_point"]["phase0_rad"].get<double>() < 0.0);

  SUBCASE("no coupling light") {
    c.eit.omega_c_mhz = 0.0;
    const CommandResult bare = cmd_spectrum(c);
    CHECK(bare.summary["delta_t_mhz"].is_null());
    const csv::ParsedTable b = csv::parse(file(bare, "spectrum.csv").content);
    for (const auto& row : b.rows) {
      CHECK(row[1] == row[3]);
      CHECK(row[2] == row[4]);
    }
  }
  SUBCASE("single point") {
    c.spectrum_grid = {-10.0, -10.0, 1};
    CHECK(csv::parse(file(cmd_spectrum(c), "spectrum.csv").content).rows.size() == 1);
  }
}

namespace {

std::string read_data(const std::string& name) {
  std::ifstream in(std::string(RYDEIT_TEST_DATA_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("spectrum matches the golden snapshot") {
  const RunConfig c = parse_config_text(read_data("small.json"));
  const csv::ParsedTable got = csv::parse(file(cmd_spectrum(c), "spectrum.csv").content);
  const csv::ParsedTable want = csv::parse(read_data("golden_spectrum_small.csv"));
  REQUIRE(got.header == want.header);
  REQUIRE(got.rows.size() == want.rows.size());
  for (std::size_t i = 0; i < got.rows.size(); ++i)
    for (std::size_t j = 0; j < got.header.size(); ++j)
      CHECK(std::abs(got.rows[i][j] - want.rows[i][j]) <= 1e-12 * std::abs(want.rows[i][j]) + 1e-300);

  // Three rows evaluated independently at 40 digits (mpmath):
  // Δ_s/2π = -11, -10, 0 MHz -> T_EIT, φ_EIT, T_two-level, φ_two-level.
  const double hand[3][5] = {
      {-11.0, 0.0046254843311409005, -5.434482670774195, 0.10310565427949503, 4.0827654281966841},
      {-10.0, 0.54392527599196708, -1.6579625692924288, 0.066653060610541908, 4.4242805635922135},
      {0.0, 3.7740503473012123e-6, 7.6848983807294241, 1.8541370244078813e-14, 0.0},
  };
  for (const auto& row : hand) {
    const auto it = std::find_if(want.rows.begin(), want.rows.end(), [&](const auto& r) { return r[0] == row[0]; });
    REQUIRE(it != want.rows.end());
    for (int j = 1; j < 5; ++j) CHECK(std::abs((*it)[j] - row[j]) <= 1e-10 * std::abs(row[j]) + 1e-15);
  }
}

TEST_CASE("blockade-phase command") {
  RunConfig c;
  const CommandResult r = cmd_blockade_phase(c);
  CHECK(r.summary["blockade_radius_um"].get<double>() == doctest::Approx(14.0).epsilon(0.5 / 14.0));
  CHECK(r.summary["reversal_ratio"].get<double>() > 1.1);
  c.blockade.c6_au = 0.0;
  c.blockade.delta_t_mhz = 3.7;
  CHECK(std::abs(cmd_blockade_phase(c).summary["integral"]["controlled_phase_rad"].get<double>()) < 1e-9);
}

TEST_CASE("tomography command") {
  RunConfig c;
  c.experiment.repetitions = 200000;
  const CommandResult a = cmd_tomography(c);
  c.experiment.threads = 4;
  const CommandResult b = cmd_tomography(c);
  CHECK(a.summary["controlled_phase_rad"] == b.summary["controlled_phase_rad"]);
  CHECK(file(a, "tomography_counts.csv").content == file(b, "tomography_counts.csv").content);

  const double got = a.summary["controlled_phase_rad"].get<double>();
  const double want = a.summary["expected_controlled_phase_rad"].get<double>();
  const double err = a.summary["controlled_phase_error_rad"].get<double>();
  CHECK(std::abs(got - want) < 4 * err);

  c.experiment.repetitions = 0;
  try {
    cmd_tomography(c);
    FAIL("expected InsufficientStatistics");
  } catch (const InsufficientStatistics& e) {
    CHECK(e.exit_code() == 4);
  }
}

TEST_CASE("fit command end to end") {
  RunConfig c;
  const CommandResult spec = cmd_spectrum(c);
  const csv::ParsedTable t = csv::parse(file(spec, "spectrum.csv").content);
  csv::Table input({"delta_s_mhz", "transmission", "sigma"});
  for (std::size_t i = 0; i < t.rows.size(); i += 3) input.add_row({t.rows[i][0], t.rows[i][1], 0.01});

  const CommandResult r = cmd_fit(c, input.str());
  CHECK(r.summary["estimate"]["omega_c_mhz"].get<double>() == doctest::Approx(11.75).epsilon(1e-3));
  CHECK(r.summary["estimate"]["delta_c_mhz"].get<double>() == doctest::Approx(9.1).epsilon(1e-3));
  CHECK(r.summary["delta_t_mhz"].get<double>() == doctest::Approx(3.7).epsilon(0.02));
  CHECK(csv::parse(file(r, "fit_prediction.csv").content).rows.size() == 201);

  CHECK_THROWS_AS(cmd_fit(c, "delta_s_mhz,transmission\n1,0.5\n"), UsageError);
  CHECK_THROWS_AS(cmd_fit(c, "delta_s_mhz,transmission,sigma\n1,0.5,0.1\n"), UsageError);
}

TEST_CASE("retrieval command") {
  const CommandResult r = cmd_retrieval(RunConfig{});
  CHECK(r.summary["efficiency_zero_delay"] == 0.2);
  CHECK(std::abs(r.summary["efficiency_at_delayed_time"].get<double>() - 0.07) < 1e-12);
  CHECK(csv::parse(file(r, "retrieval.csv").content).rows.size() == 101);
}
