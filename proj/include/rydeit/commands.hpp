#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rydeit/config.hpp"
#include "rydeit/fitting.hpp"

namespace rydeit {

struct OutputFile {
  std::string name;
  std::string content;
};

/// What a subcommand produces: a JSON summary plus zero or more CSV files.
/// Every summary carries `tool`, `version`, `command` and `config_echo`.
struct CommandResult {
  nlohmann::json summary;
  std::vector<OutputFile> files;
};

CommandResult cmd_spectrum(const RunConfig& config);
CommandResult cmd_blockade_phase(const RunConfig& config);
CommandResult cmd_density_scan(const RunConfig& config);
CommandResult cmd_tomography(const RunConfig& config);
CommandResult cmd_fit(const RunConfig& config, const std::string& input_csv);
CommandResult cmd_retrieval(const RunConfig& config);

/// Dispatch by subcommand name (spectrum, blockade-phase, density-scan,
/// tomography, fit, retrieval). `input_csv` is only used by fit.
CommandResult run_command(const std::string& name, const RunConfig& config, const std::string& input_csv = {});

const std::vector<std::string>& command_names();

/// Columns delta_s_mhz, transmission, sigma and optionally phase_rad, phase_sigma.
SpectrumData spectrum_data_from_csv(const std::string& text);

}  // namespace rydeit
