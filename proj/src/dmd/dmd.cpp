#include "sdm/dmd/dmd.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace sdm {
namespace {

using cd = std::complex<double>;

bool is_conjugate(cd a, cd b) {
  const double scale = std::max(1.0, std::abs(a));
  return std::abs(a.imag()) > 0.0 && std::abs(a - std::conj(b)) <= 1e-9 * scale;
}

}  // namespace

int SnapshotSvd::numerical_rank() const {
  if (s.size() == 0 || !(s(0) > 0.0)) return 0;
  const double floor = kSvdRelativeTolerance * s(0);
  int n = 0;
  while (n < s.size() && s(n) > floor) ++n;
  return n;
}

SnapshotSvd snapshot_svd(const StackedPair& pair) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(pair.x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

ModeSpectrum eig_to_physics(std::complex<double> lambda, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (lambda == cd(0.0, 0.0)) return {0.0, 0.0, true};
  double angle = std::arg(lambda);
  if (angle <= -std::numbers::pi) angle = std::numbers::pi;
  return {angle / (2.0 * std::numbers::pi * dt), std::pow(std::abs(lambda), 1.0 / dt), false};
}

DmdResult exact_dmd(const StackedPair& pair, int rank, double dt) {
  return exact_dmd(pair, snapshot_svd(pair), rank, dt);
}

DmdResult exact_dmd(const StackedPair& pair, const SnapshotSvd& svd, int rank, double dt) {
  if (rank < 1) throw std::invalid_argument("rank must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (pair.channels < 1 || pair.x.rows() != pair.h * pair.channels || pair.x.rows() != pair.xp.rows() ||
      pair.x.cols() != pair.xp.cols() || pair.x.cols() < 1)
    throw std::invalid_argument("malformed stacked pair");

  DmdResult out;
  out.dt = dt;
  out.truncation.requested_rank = rank;
  out.truncation.singular_values = svd.s;
  out.modes.resize(pair.channels, 0);

  const int max_rank = static_cast<int>(std::min(pair.x.rows(), pair.x.cols()));
  if (rank > max_rank) {
    out.truncation.clamped = true;
    out.warnings.push_back("rank " + std::to_string(rank) + " clamped to " + std::to_string(max_rank));
    rank = max_rank;
  }
  const int k = std::min(rank, svd.numerical_rank());
  out.truncation.effective_rank = k;
  out.rank_used = k;
  if (k == 0) {
    out.warnings.push_back("snapshot matrix is numerically zero");
    return out;
  }

  // B = X' V S^-1, reduced operator A~ = U* B, exact modes Phi = B W.
  const Eigen::MatrixXd b_op =
      pair.xp * svd.v.leftCols(k) * svd.s.head(k).cwiseInverse().asDiagonal();
  const Eigen::MatrixXd a_tilde = svd.u.leftCols(k).transpose() * b_op;
  Eigen::EigenSolver<Eigen::MatrixXd> eig(a_tilde, true);
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const Eigen::VectorXcd lambda = eig.eigenvalues();
  const Eigen::MatrixXcd stacked_modes = b_op.cast<cd>() * eig.eigenvectors();

  const Eigen::VectorXcd x0 = pair.x.col(0).cast<cd>();
  const Eigen::VectorXcd amp = stacked_modes.completeOrthogonalDecomposition().solve(x0);

  // Group conjugate partners, then order groups by amplitude magnitude.
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < k; ++i) {
    if (i + 1 < k && is_conjugate(lambda(i), lambda(i + 1))) {
      if (lambda(i).imag() > 0.0) groups.push_back({i, i + 1});
      else groups.push_back({i + 1, i});
      ++i;
    } else {
      groups.push_back({i});
    }
  }
  auto group_key = [&](const std::vector<int>& g) {
    double m = 0.0;
    for (int i : g) m = std::max(m, std::abs(amp(i)));
    return m;
  };
  std::stable_sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) {
    const double ka = group_key(a), kb = group_key(b);
    if (ka != kb) return ka > kb;
    return std::abs(std::arg(lambda(a.front()))) < std::abs(std::arg(lambda(b.front())));
  });

  const auto target = static_cast<std::size_t>(std::min<Eigen::Index>(k, pair.channels));
  std::vector<int> keep;
  for (const auto& g : groups) {
    if (keep.size() >= target) break;
    keep.insert(keep.end(), g.begin(), g.end());
  }

  const auto n = static_cast<Eigen::Index>(keep.size());
  out.modes.resize(pair.channels, n);
  out.eigenvalues.resize(n);
  out.frequencies.resize(n);
  out.growth_rates.resize(n);
  out.amplitudes.resize(n);
  out.degenerate.assign(static_cast<std::size_t>(n), false);
  for (Eigen::Index j = 0; j < n; ++j) {
    const int src = keep[static_cast<std::size_t>(j)];
    Eigen::VectorXcd mode = stacked_modes.col(src).head(pair.channels);
    const double norm = mode.norm();
    cd a = amp(src);
    if (norm > 0.0) {
      mode /= norm;
      a *= norm;
    } else {
      out.warnings.push_back("mode " + std::to_string(j) + " vanishes on the leading channel block");
    }
    out.modes.col(j) = mode;
    out.amplitudes(j) = a;
    out.eigenvalues(j) = lambda(src);
    const ModeSpectrum spec = eig_to_physics(lambda(src), dt);
    out.frequencies(j) = spec.frequency_hz;
    out.growth_rates(j) = spec.growth_rate;
    out.degenerate[static_cast<std::size_t>(j)] = spec.degenerate;
  }
  return out;
}

Eigen::MatrixXcd reconstruct(const DmdResult& result, std::span<const double> times) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(result.channels(), static_cast<Eigen::Index>(times.size()));
  for (Eigen::Index k = 0; k < result.mode_count(); ++k) {
    const cd lambda = result.eigenvalues(k);
    const bool zero = result.degenerate[static_cast<std::size_t>(k)];
    const cd log_lambda = zero ? cd(0.0, 0.0) : std::log(lambda);
    for (std::size_t t = 0; t < times.size(); ++t) {
      const double steps = times[t] / result.dt;
      cd dyn;
      if (zero) dyn = steps == 0.0 ? cd(1.0, 0.0) : cd(0.0, 0.0);
      else dyn = std::exp(steps * log_lambda);
      out.col(static_cast<Eigen::Index>(t)) += result.modes.col(k) * (dyn * result.amplitudes(k));
    }
  }
  return out;
}

double imaginary_residual(const Eigen::MatrixXcd& values) {
  if (values.size() == 0) return 0.0;
  const double re = values.real().cwiseAbs().maxCoeff();
  const double im = values.imag().cwiseAbs().maxCoeff();
  if (re == 0.0) return im == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return im / re;
}

std::vector<double> sample_times(Eigen::Index samples, double dt) {
  std::vector<double> t(static_cast<std::size_t>(samples));
  for (Eigen::Index i = 0; i < samples; ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(i) * dt;
  return t;
}

}  // namespace sdm
