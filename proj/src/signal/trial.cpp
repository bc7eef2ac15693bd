#include "sdm/signal/trial.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace sdm {

std::vector<std::string> default_channel_ids(Eigen::Index count) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) ids.push_back("ch" + std::to_string(i));
  return ids;
}

TrialMatrix::TrialMatrix(Eigen::MatrixXd data, double dt, std::vector<std::string> channel_ids)
    : data_(std::move(data)), dt_(dt), channel_ids_(std::move(channel_ids)) {
  if (data_.rows() < 1) throw std::invalid_argument("trial needs at least one channel");
  if (data_.cols() < 2) throw std::invalid_argument("trial needs at least two samples");
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw std::invalid_argument("dt must be positive and finite");
  if (!data_.allFinite()) throw std::invalid_argument("trial contains non-finite samples");
  if (channel_ids_.empty()) {
    channel_ids_ = default_channel_ids(data_.rows());
  } else if (static_cast<Eigen::Index>(channel_ids_.size()) != data_.rows()) {
    throw std::invalid_argument("channel_ids size does not match channel count");
  }
}

Eigen::Index Dataset::channels() const {
  return trials.empty() ? 0 : trials.front().channels();
}

double Dataset::dt() const {
  return trials.empty() ? 0.0 : trials.front().dt();
}

void Dataset::validate() const {
  const std::size_t n = trials.size();
  for (const auto& t : trials) {
    if (t.channels() != channels()) throw std::invalid_argument("trials differ in channel count");
    if (t.dt() != dt()) throw std::invalid_argument("trials differ in sampling interval");
  }
  if (labels && labels->size() != n) throw std::invalid_argument("label count does not match trials");
  if (targets && static_cast<std::size_t>(targets->rows()) != n)
    throw std::invalid_argument("target row count does not match trials");
  if (groups && groups->size() != n) throw std::invalid_argument("group count does not match trials");
}

}  // namespace sdm
