#include "sdm/common/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdm {

double pearson(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
               bool* degenerate) {
  if (a.size() != b.size()) throw std::invalid_argument("pearson: length mismatch");
  if (degenerate) *degenerate = false;
  if (a.size() < 2) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  const Eigen::VectorXd da = a.array() - a.mean();
  const Eigen::VectorXd db = b.array() - b.mean();
  const double saa = da.squaredNorm();
  const double sbb = db.squaredNorm();
  if (saa == 0.0 || sbb == 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return std::clamp(da.dot(db) / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace sdm
