#pragma once

#include "sdm/dmd/dmd.hpp"

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <random>

namespace sdm_test {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = g(rng);
  return m;
}

inline Eigen::MatrixXcd random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = {g(rng), g(rng)};
  return m;
}

/// P x K mode matrix closed under conjugation: conjugate column pairs plus
/// real columns, as exact DMD produces for real-valued data.
inline Eigen::MatrixXcd random_conjugate_closed(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::bernoulli_distribution real_column(0.25);
  Eigen::MatrixXcd m(rows, cols);
  Eigen::Index at = 0;
  while (at < cols) {
    if (at + 1 < cols && !real_column(rng)) {
      const Eigen::VectorXcd phi = random_complex(rows, 1, rng).col(0);
      m.col(at) = phi;
      m.col(at + 1) = phi.conjugate();
      at += 2;
    } else {
      m.col(at) = random_matrix(rows, 1, rng).col(0).cast<std::complex<double>>();
      ++at;
    }
  }
  return m;
}

/// A DMD result with random unit modes and random frequencies in
/// [0, Nyquist]; some modes come as conjugate pairs, some sit exactly on
/// band edges or at Nyquist.
inline sdm::DmdResult random_dmd_result(Eigen::Index channels, int pairs, int reals, double dt,
                                        std::mt19937_64& rng, const std::vector<double>& edges = {}) {
  const double nyquist = 0.5 / dt;
  std::uniform_real_distribution<double> uf(0.0, nyquist);
  std::uniform_int_distribution<std::size_t> pick(0, edges.empty() ? 0 : edges.size() - 1);
  std::bernoulli_distribution on_edge(0.3);
  sdm::DmdResult r;
  r.dt = dt;
  const int k = 2 * pairs + reals;
  r.modes.resize(channels, k);
  r.frequencies.resize(k);
  r.eigenvalues.resize(k);
  r.growth_rates = Eigen::VectorXd::Ones(k);
  r.amplitudes = Eigen::VectorXcd::Ones(k);
  r.degenerate.assign(static_cast<std::size_t>(k), false);
  Eigen::Index at = 0;
  for (int p = 0; p < pairs; ++p) {
    const double f = !edges.empty() && on_edge(rng) ? edges[pick(rng)] : uf(rng);
    Eigen::VectorXcd phi = random_complex(channels, 1, rng).col(0);
    phi.normalize();
    r.modes.col(at) = phi;
    r.modes.col(at + 1) = phi.conjugate();
    r.frequencies(at) = f;
    r.frequencies(at + 1) = -f;
    at += 2;
  }
  for (int q = 0; q < reals; ++q) {
    Eigen::VectorXcd phi = random_matrix(channels, 1, rng).col(0).cast<std::complex<double>>();
    phi.normalize();
    r.modes.col(at) = phi;
    r.frequencies(at) = q % 2 == 0 ? 0.0 : nyquist;
    ++at;
  }
  for (Eigen::Index i = 0; i < k; ++i)
    r.eigenvalues(i) = std::polar(1.0, 2 * std::numbers::pi * r.frequencies(i) * dt);
  r.rank_used = k;
  return r;
}

}  // namespace sdm_test
