#include "common.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace sdmkit {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: " + s);
  }
  if (used != s.size()) throw UsageError("not a number: " + s);
  return v;
}

}  // namespace

std::vector<sdm::Band> parse_bands(const std::string& text) {
  std::vector<sdm::Band> bands;
  for (const auto& item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("band must be lo:hi, got " + item);
    bands.push_back({to_double(item.substr(0, colon)), to_double(item.substr(colon + 1))});
    if (!(bands.back().low >= 0.0 && bands.back().low < bands.back().high))
      throw UsageError("band needs 0 <= lo < hi, got " + item);
  }
  if (bands.empty()) throw UsageError("empty band list");
  return bands;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) {
    const double v = to_double(item);
    if (v != static_cast<int>(v)) throw UsageError("not an integer: " + item);
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(item));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::string csv_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

nlohmann::json bands_json(const std::vector<sdm::Band>& bands) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& b : bands) out.push_back({b.low, b.high});
  return out;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + file.string());
}

void write_config(const std::filesystem::path& dir, const std::string& command, nlohmann::json config) {
  config["schema_version"] = kSchemaVersion;
  config["command"] = command;
  write_text(dir / "config.json", config.dump(2) + "\n");
}

nlohmann::json read_run_config(const std::filesystem::path& file, const std::vector<std::string>& allowed) {
  std::ifstream in(file);
  if (!in) throw UsageError("cannot open config " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("malformed config " + file.string() + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw UsageError("unknown config key: " + key);
  if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion)
    throw UsageError("unsupported config schema_version");
  return j;
}

}  // namespace sdmkit
