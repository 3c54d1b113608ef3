// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sdpclust/rounding.hpp"

#include <cmath>
#include <vector>

namespace sdpclust {

namespace {

constexpr double kRayleighTol = 1e-10;
constexpr int kMaxPowerIters = 10000;

// Deterministic start: normalized all-ones with an index-dependent +-1e-3
// pattern to break symmetry reproducibly.
Eigen::VectorXd start_vector(int n) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i)
    v[i] += (i % 2 == 0 ? 1.0 : -1.0) * 1e-3 * static_cast<double>(i + 1) / n;
  v.normalize();
  return v;
}

double power_iterate(const Eigen::MatrixXd& y, Eigen::VectorXd& v) {
  double rayleigh = v.dot(y * v);
  for (int iter = 0; iter < kMaxPowerIters; ++iter) {
    Eigen::VectorXd w = y * v;
    const double norm = w.norm();
    if (norm <= 1e-300) break;  // v in the null space; spectrum degenerate
    v = w / norm;
    const double next = v.dot(y * v);
    if (std::fabs(next - rayleigh) <= kRayleighTol * (1.0 + std::fabs(next))) {
      rayleigh = next;
      break;
    }
    rayleigh = next;
  }
  return rayleigh;
}

}  // namespace

RoundResult round_matrix(const Eigen::MatrixXd& y) {
  const int n = static_cast<int>(y.rows());
  Eigen::VectorXd v = start_vector(n);
  const double lambda1 = power_iterate(y, v);

  // Deflation safeguard: estimate the runner-up eigenvalue to detect a
  // (numerically) multiple top eigenvalue.
  bool degenerate = false;
  if (n >= 2) {
    const Eigen::MatrixXd deflated = y - lambda1 * v * v.transpose();
    Eigen::VectorXd v2 = start_vector(n);
    v2 -= v.dot(v2) * v;
    if (v2.norm() > 1e-12) {
      v2.normalize();
      const double lambda2 = power_iterate(deflated, v2);
      const double scale = std::max(std::fabs(lambda1), 1.0);
      degenerate = (lambda1 - lambda2) <= 1e-8 * scale;
    } else {
      degenerate = true;
    }
  }

  // Fallback is deterministic either way: the converged vector is a basis
  // vector of the dominant subspace, so we take its signs.
  std::vector<int> entries(n);
  for (int i = 0; i < n; ++i) entries[i] = v[i] >= 0.0 ? 1 : -1;
  return {LabelVector(std::move(entries)), degenerate, lambda1};
}

RoundResult round_solution(const SdpSolution& sol) { return round_matrix(sol.y); }

double misclustering(const LabelVector& est, const LabelVector& truth) {
  if (est.n() != truth.n()) throw ParamError("label vectors must have equal length");
  const int n = est.n();
  int disagree = 0;
  for (int i = 0; i < n; ++i)
    if (est[i] != truth[i]) ++disagree;
  const double f = static_cast<double>(disagree) / n;
  return std::min(f, 1.0 - f);
}

ErrorReport l1_error(const SdpSolution& sol, const LabelVector& truth) {
  if (sol.y.rows() != truth.n()) throw ParamError("dimension mismatch");
  const int n = truth.n();
  const Eigen::MatrixXd y_star = truth.truth_matrix();
  const double l1 = (sol.y - y_star).cwiseAbs().sum();
  ErrorReport r;
  r.l1_rate = l1 / (static_cast<double>(n) * n);
  r.l1_row_rate = l1 / n;
  return r;
}

ErrorReport score_solution(const SdpSolution& sol, const LabelVector& est,
                           const LabelVector& truth) {
  ErrorReport r = l1_error(sol, truth);
  r.err = misclustering(est, truth);
  r.exact = r.err == 0.0;
  return r;
}

}  // namespace sdpclust
