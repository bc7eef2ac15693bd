#pragma once

#include "sdm/features/sdm.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdmkit {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kInternal = 3 };

inline constexpr int kSchemaVersion = 1;

/// Inconsistent or malformed command-line configuration.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "lo:hi,lo:hi,..." in Hz.
std::vector<sdm::Band> parse_bands(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

/// Doubles embedded quotes for a quoted CSV field.
std::string csv_escape(const std::string& text);

nlohmann::json bands_json(const std::vector<sdm::Band>& bands);

void write_text(const std::filesystem::path& file, const std::string& text);

/// Writes `config` (plus schema version and command) as dir/config.json.
void write_config(const std::filesystem::path& dir, const std::string& command, nlohmann::json config);

/// Reads a JSON run-config file, rejecting keys outside `allowed`.
nlohmann::json read_run_config(const std::filesystem::path& file, const std::vector<std::string>& allowed);

void add_synth_command(CLI::App& app);
void add_featurize_command(CLI::App& app);
void add_decode_command(CLI::App& app);
void add_analyze_command(CLI::App& app);
void add_bench_command(CLI::App& app);

}  // namespace sdmkit
