#include "sdm/signal/dataset_io.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sdm {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
T to_little_endian(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&value, bytes, sizeof(T));
  }
  return value;
}

template <typename T>
void put(std::ostream& out, T value) {
  value = to_little_endian(value);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in, const fs::path& file) {
  T value;
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
    throw DataError("truncated trial file: " + file.string());
  return to_little_endian(value);
}

std::string trial_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "trials/%06zu.bin", index);
  return buf;
}

}  // namespace

void write_trial_binary(const Eigen::MatrixXd& data, const fs::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + file.string());
  put<std::uint64_t>(out, static_cast<std::uint64_t>(data.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(data.cols()));
  for (Eigen::Index r = 0; r < data.rows(); ++r)
    for (Eigen::Index c = 0; c < data.cols(); ++c) put<double>(out, data(r, c));
  if (!out) throw DataError("write failed: " + file.string());
}

Eigen::MatrixXd read_trial_binary(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open trial file: " + file.string());
  const auto rows = get<std::uint64_t>(in, file);
  const auto cols = get<std::uint64_t>(in, file);
  if (rows == 0 || cols == 0 || rows > (1ULL << 24) || cols > (1ULL << 32))
    throw DataError("implausible trial shape in " + file.string());
  Eigen::MatrixXd data(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < data.rows(); ++r)
    for (Eigen::Index c = 0; c < data.cols(); ++c) data(r, c) = get<double>(in, file);
  return data;
}

Eigen::MatrixXd read_trial_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open trial file: " + file.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw DataError("non-numeric cell '" + cell + "' in " + file.string());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataError("ragged rows in " + file.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("empty trial file: " + file.string());
  Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return data;
}

void write_dataset(const Dataset& dataset, const fs::path& dir) {
  dataset.validate();
  if (dataset.trials.empty()) throw std::invalid_argument("cannot write an empty dataset");
  fs::create_directories(dir / "trials");

  json manifest;
  manifest["format"] = "sdm-dataset";
  manifest["version"] = 1;
  manifest["dt"] = dataset.dt();
  manifest["channels"] = dataset.channels();
  manifest["channel_ids"] = dataset.trials.front().channel_ids();
  json trials = json::array();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const std::string rel = trial_file_name(i);
    write_trial_binary(dataset.trials[i].data(), dir / rel);
    json entry;
    entry["file"] = rel;
    if (dataset.labels) entry["label"] = (*dataset.labels)[i];
    if (dataset.targets) {
      const auto row = dataset.targets->row(static_cast<Eigen::Index>(i));
      entry["target"] = std::vector<double>(row.begin(), row.end());
    }
    if (dataset.groups) entry["group"] = (*dataset.groups)[i];
    trials.push_back(std::move(entry));
  }
  manifest["trials"] = std::move(trials);

  std::ofstream out(dir / kManifestName, std::ios::trunc);
  if (!out) throw DataError("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
  if (!out) throw DataError("manifest write failed in " + dir.string());
}

Dataset read_dataset(const fs::path& path) {
  const fs::path manifest_path = fs::is_directory(path) ? path / kManifestName : path;
  const fs::path root = manifest_path.parent_path();
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot open manifest: " + manifest_path.string());

  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw DataError("malformed manifest: " + std::string(e.what()));
  }

  try {
    if (manifest.value("format", std::string{}) != "sdm-dataset")
      throw DataError("manifest format tag is not sdm-dataset");
    if (manifest.value("version", 0) != 1) throw DataError("unsupported manifest version");
    const double dt = manifest.at("dt").get<double>();
    const auto channels = manifest.at("channels").get<Eigen::Index>();
    std::vector<std::string> ids;
    if (manifest.contains("channel_ids")) ids = manifest["channel_ids"].get<std::vector<std::string>>();

    const auto& entries = manifest.at("trials");
    if (!entries.is_array() || entries.empty()) throw DataError("manifest lists no trials");

    Dataset ds;
    const bool has_label = entries.front().contains("label");
    const bool has_target = entries.front().contains("target");
    const bool has_group = entries.front().contains("group");
    if (has_label) ds.labels.emplace();
    if (has_group) ds.groups.emplace();
    std::vector<std::vector<double>> targets;

    for (const auto& e : entries) {
      if (e.contains("label") != has_label || e.contains("target") != has_target ||
          e.contains("group") != has_group)
        throw DataError("trial entries disagree on label/target/group fields");
      const fs::path file = root / e.at("file").get<std::string>();
      Eigen::MatrixXd data =
          file.extension() == ".csv" ? read_trial_csv(file) : read_trial_binary(file);
      if (data.rows() != channels)
        throw DataError("trial " + file.string() + " has " + std::to_string(data.rows()) +
                        " channels, manifest says " + std::to_string(channels));
      try {
        ds.trials.emplace_back(std::move(data), dt, ids);
      } catch (const std::invalid_argument& err) {
        throw DataError(file.string() + ": " + err.what());
      }
      if (has_label) ds.labels->push_back(e.at("label").get<int>());
      if (has_group) ds.groups->push_back(e.at("group").get<int>());
      if (has_target) targets.push_back(e.at("target").get<std::vector<double>>());
    }
    if (has_target) {
      const std::size_t m = targets.front().size();
      if (m == 0) throw DataError("empty target vectors");
      Eigen::MatrixXd t(static_cast<Eigen::Index>(targets.size()), static_cast<Eigen::Index>(m));
      for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i].size() != m) throw DataError("target vectors differ in length");
        for (std::size_t j = 0; j < m; ++j)
          t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = targets[i][j];
      }
      ds.targets = std::move(t);
    }
    ds.validate();
    return ds;
  } catch (const json::exception& e) {
    throw DataError("manifest schema error: " + std::string(e.what()));
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
}

}  // namespace sdm
