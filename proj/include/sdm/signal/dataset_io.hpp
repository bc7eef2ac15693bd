#pragma once

#include "sdm/signal/trial.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace sdm {

/// Malformed or unreadable input data (as opposed to a caller bug).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dataset directory layout:
///
///   manifest.json   {"format": "sdm-dataset", "version": 1, "dt": ..,
///                    "channels": P, "channel_ids": [...],
///                    "trials": [{"file": "trials/000000.bin",
///                                "label": 0, "target": [..], "group": 3}, ...]}
///   trials/*.bin    u64 P, u64 L, then P*L float64, all little-endian,
///                   row-major channel x sample.
///
/// Trial files ending in ".csv" are read as text, one channel per row.
inline constexpr const char* kManifestName = "manifest.json";

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

/// Accepts either the dataset directory or the manifest path itself.
Dataset read_dataset(const std::filesystem::path& path);

void write_trial_binary(const Eigen::MatrixXd& data, const std::filesystem::path& file);
Eigen::MatrixXd read_trial_binary(const std::filesystem::path& file);
Eigen::MatrixXd read_trial_csv(const std::filesystem::path& file);

}  // namespace sdm
