// rydeit: command-line front end. One JSON config, CSV/JSON outputs.
//
//   rydeit spectrum --config run.json --out results/
//   rydeit fit --input spectrum.csv --config run.json
//
// Exit codes: 0 ok, 2 config/usage error, 3 numerical failure,
// 4 insufficient statistics.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rydeit/commands.hpp"
#include "rydeit/config.hpp"
#include "rydeit/errors.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rydeit::UsageError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write to a sibling temp file, then rename over the target.
void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw rydeit::UsageError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw rydeit::UsageError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

struct Invocation {
  std::string config_path;
  std::string out_dir = ".";
  std::string input_path;
  std::optional<std::uint64_t> seed;
};

int run(const std::string& command, const Invocation& inv) {
  rydeit::RunConfig config;
  if (!inv.config_path.empty()) config = rydeit::parse_config_text(read_file(inv.config_path));
  if (inv.seed) config.seed = *inv.seed;

  std::string input;
  if (command == "fit") {
    if (inv.input_path.empty()) throw rydeit::UsageError("fit: --input is required");
    input = read_file(inv.input_path);
  }

  const rydeit::CommandResult result = rydeit::run_command(command, config, input);

  const fs::path out(inv.out_dir);
  fs::create_directories(out);
  for (const auto& f : result.files) write_atomic(out / f.name, f.content);
  std::string name = command;
  for (char& ch : name)
    if (ch == '-') ch = '_';
  const std::string json = result.summary.dump(2) + "\n";
  write_atomic(out / (name + ".json"), json);
  std::cout << json;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rydberg-EIT cross-phase modulation simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("rydeit ") + RYDEIT_VERSION);

  Invocation inv;
  std::uint64_t seed = 0;
  std::string selected;

  const std::map<std::string, std::string> help{
      {"spectrum", "Transmission and phase spectra with and without the coupling light"},
      {"blockade-phase", "Blockade radius, hard-sphere and radius-resolved controlled phase"},
      {"density-scan", "Phases with 0 and 1 stored excitations versus density, with linear fits"},
      {"tomography", "Monte Carlo polarization tomography of the target with and without control"},
      {"fit", "Fit the susceptibility model to a measured transmission spectrum"},
      {"retrieval", "Storage-and-retrieval efficiency versus storage time"},
  };

  for (const auto& name : rydeit::command_names()) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("-c,--config", inv.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("-o,--out", inv.out_dir, "Output directory");
    sub->add_option("--seed", seed, "Override the configured RNG seed")->each([&](const std::string&) {
      inv.seed = seed;
    });
    if (name == "fit") sub->add_option("-i,--input", inv.input_path, "Spectrum CSV to fit")->required();
    sub->callback([&selected, name] { selected = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run(selected, inv);
  } catch (const rydeit::ConfigError& e) {
    std::cerr << "config error at " << e.path() << ": " << e.what() << "\n";
    return e.exit_code();
  } catch (const rydeit::NonConvergence& e) {
    std::cerr << "fit did not converge after " << e.iterations() << " iterations: " << e.what() << "\nbest point:";
    for (double x : e.best_point()) std::cerr << ' ' << x;
    std::cerr << "\n";
    return e.exit_code();
  } catch (const rydeit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
