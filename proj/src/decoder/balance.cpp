#include "sdm/decoder/balance.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>

namespace sdm {

std::vector<std::size_t> oversample_indices(std::span<const int> labels, std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);

  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  if (members.empty()) return out;

  std::size_t majority = 0;
  for (const auto& [c, idx] : members) majority = std::max(majority, idx.size());

  std::mt19937_64 rng(seed);
  for (const auto& [c, idx] : members) {
    const std::size_t have = idx.size();
    if (have == majority) continue;
    const std::size_t whole = majority / have;
    for (std::size_t rep = 1; rep < whole; ++rep) out.insert(out.end(), idx.begin(), idx.end());
    std::vector<std::size_t> pool(idx);
    std::shuffle(pool.begin(), pool.end(), rng);
    out.insert(out.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(majority % have));
  }
  return out;
}

std::pair<Eigen::MatrixXd, std::vector<int>> oversample_balance(const Eigen::MatrixXd& x,
                                                                std::span<const int> labels,
                                                                std::uint64_t seed) {
  if (static_cast<std::size_t>(x.rows()) != labels.size())
    throw std::invalid_argument("feature rows do not match labels");
  const auto idx = oversample_indices(labels, seed);
  Eigen::MatrixXd xo(static_cast<Eigen::Index>(idx.size()), x.cols());
  std::vector<int> yo(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    xo.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(idx[i]));
    yo[i] = labels[idx[i]];
  }
  return {std::move(xo), std::move(yo)};
}

}  // namespace sdm
