#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "gbsense/frontend.hpp"
#include "gbsense/pattern.hpp"
#include "gbsense/types.hpp"

namespace gbsense {

struct RecoveryConfig {
  // Greedy iteration cap; 0 means floor(P/2), the identifiability bound for
  // jointly sparse recovery from P lanes. Must not exceed P.
  int max_support = 0;
  // Relative Frobenius residual at which the greedy loop stops.
  double residual_tol = 1e-6;
  // Energy-detection threshold factor; a subband is declared active when its
  // recovered row energy exceeds this multiple of the noise reference.
  // Calibrated so pure-noise rows never pass while the weakest genuine rows
  // clear it with margin at the 10 dB operating point.
  double ed_threshold_factor = 8.0;

  int resolved_max_support(int num_lanes) const {
    const int k = max_support > 0 ? max_support : num_lanes / 2;
    if (k > num_lanes)
      fail(errc::invalid_value, "max_support " + std::to_string(k) + " exceeds lane count " +
                                    std::to_string(num_lanes));
    return k;
  }
};

// Recovered spectrum: selected subband rows of Theta (L x N', rows off the
// support are exactly zero), their energies, and the final residual.
// Support indices are Theta row indices, i.e. unshifted DFT sections.
struct SpectrumEstimate {
  std::vector<int> support;  // in selection order
  Eigen::MatrixXcd theta;    // L x N'
  std::vector<double> subband_energy;
  double residual_norm = 0.0;  // Frobenius norm of X - A_S Theta_S

  std::set<int> support_set() const { return {support.begin(), support.end()}; }
};

// Simultaneous orthogonal matching pursuit with a full least-squares refit
// of every selected row per iteration. Column l* maximizing ||A_l^H R||_2
// is selected each round (ties to the lowest index); the loop stops when
// the support reaches the cap or the relative residual drops under tol.
// Columns of A all have norm sqrt(P), so no column normalization is applied.
inline SpectrumEstimate somp(const MeasurementMatrix& measurement, const SensingMatrix& sensing,
                             const RecoveryConfig& config = {}) {
  const auto& X = measurement.entries;
  const auto& A = sensing.entries;
  if (X.rows() != A.rows())
    fail(errc::dimension_mismatch, "measurement has " + std::to_string(X.rows()) +
                                       " rows, sensing matrix has " + std::to_string(A.rows()));
  const int L = static_cast<int>(A.cols());
  const int P = static_cast<int>(A.rows());
  const int cap = config.resolved_max_support(P);

  SpectrumEstimate est;
  est.theta = Eigen::MatrixXcd::Zero(L, X.cols());
  est.subband_energy.assign(static_cast<std::size_t>(L), 0.0);

  const double x_norm = X.norm();
  Eigen::MatrixXcd residual = X;
  Eigen::MatrixXcd theta_s;
  std::vector<char> selected(static_cast<std::size_t>(L), 0);

  while (static_cast<int>(est.support.size()) < cap) {
    const double rel = x_norm > 0.0 ? residual.norm() / x_norm : 0.0;
    if (rel <= config.residual_tol) break;

    int best = -1;
    double best_score = -1.0;
    const Eigen::MatrixXcd corr = A.adjoint() * residual;  // L x N'
    for (int l = 0; l < L; ++l) {
      if (selected[static_cast<std::size_t>(l)]) continue;
      const double score = corr.row(l).norm();
      if (score > best_score) {
        best_score = score;
        best = l;
      }
    }
    if (best < 0) break;
    selected[static_cast<std::size_t>(best)] = 1;
    est.support.push_back(best);

    const int k = static_cast<int>(est.support.size());
    Eigen::MatrixXcd A_s(P, k);
    for (int i = 0; i < k; ++i) A_s.col(i) = A.col(est.support[static_cast<std::size_t>(i)]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A_s);
    if (qr.rank() < k)
      fail(errc::rank_deficient_support,
           "selected sensing columns are numerically dependent; the pattern cannot "
           "separate the chosen subbands");
    theta_s = qr.solve(X);
    residual = X - A_s * theta_s;
  }

  for (int i = 0; i < static_cast<int>(est.support.size()); ++i)
    est.theta.row(est.support[static_cast<std::size_t>(i)]) = theta_s.row(i);
  for (int l = 0; l < L; ++l)
    est.subband_energy[static_cast<std::size_t>(l)] = est.theta.row(l).squaredNorm();
  est.residual_norm = residual.norm();
  return est;
}

/// Subbands of the estimate whose row energy exceeds gamma times the noise
/// reference. A zero reference keeps every support row with nonzero energy.
inline std::set<int> energy_detect(const SpectrumEstimate& estimate,
                                   double noise_energy_per_subband,
                                   const RecoveryConfig& config = {}) {
  if (noise_energy_per_subband < 0.0)
    fail(errc::invalid_value, "noise energy must be nonnegative");
  if (!(config.ed_threshold_factor > 0.0))
    fail(errc::invalid_value, "threshold factor must be positive");
  std::set<int> active;
  for (int l : estimate.support)
    if (estimate.subband_energy[static_cast<std::size_t>(l)] >
        config.ed_threshold_factor * noise_energy_per_subband)
      active.insert(l);
  return active;
}

// Residual energy spread over the unselected subbands. This estimates the
// noise level on the same scale as the recovered row energies that
// energy_detect thresholds, which exceeds the per-row noise energy of the
// true tiled spectrum by roughly L/P (aliasing folds all L sections into
// every lane measurement).
inline double estimate_noise_floor(const MeasurementMatrix& measurement,
                                   const SensingMatrix& sensing,
                                   const SpectrumEstimate& estimate) {
  const Eigen::MatrixXcd residual = measurement.entries - sensing.entries * estimate.theta;
  const int free_rows =
      std::max(1, static_cast<int>(sensing.entries.cols()) - static_cast<int>(estimate.support.size()));
  return residual.squaredNorm() / static_cast<double>(free_rows);
}

}  // namespace gbsense
