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

#include "sdpclust/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <variant>

namespace sdpclust {

DualCertificate dual_certificate(const Observation& obs, const LabelVector& truth,
                                 const SnrSummary& summary) {
  const Eigen::MatrixXd a0 = shifted_adjacency(obs, summary);
  const Eigen::VectorXd s = truth.as_vector();
  const Eigen::VectorXd a0s = a0 * s;
  DualCertificate cert;
  cert.d = s.array() * a0s.array();
  return cert;
}

Eigen::MatrixXd project_t_perp(const Eigen::MatrixXd& m, const LabelVector& truth) {
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) throw SymmetryError("matrix asymmetric beyond 1e-12");
  const int n = truth.n();
  const Eigen::VectorXd u = truth.as_vector() / std::sqrt(static_cast<double>(n));
  const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) - u * u.transpose();
  return proj * m * proj;
}

Eigen::MatrixXd project_t(const Eigen::MatrixXd& m, const LabelVector& truth) {
  return m - project_t_perp(m, truth);
}

Eigen::MatrixXd expected_adjacency(const ModelParams& model, const LabelVector& truth) {
  const int n = truth.n();
  const Eigen::MatrixXd y_star = truth.truth_matrix();
  if (std::holds_alternative<Z2Params>(model)) return y_star;
  if (const auto* cbm = std::get_if<CbmParams>(&model))
    return cbm->alpha * (1.0 - 2.0 * cbm->eps) * y_star;
  const auto& sbm = std::get<SbmParams>(model);
  return 0.5 * (sbm.p - sbm.q) * y_star +
         0.5 * (sbm.p + sbm.q) * Eigen::MatrixXd::Ones(n, n);
}

PtPerpFactsReport check_ptperp_facts(const SdpSolution& sol, const LabelVector& truth) {
  const int n = truth.n();
  const Eigen::MatrixXd yp = project_t_perp(sol.y, truth);
  const Eigen::MatrixXd y_star = truth.truth_matrix();

  PtPerpFactsReport r;
  r.trace_value = yp.trace();
  r.l1_row_rate = (sol.y - y_star).cwiseAbs().sum() / n;
  r.trace_identity_dev = std::fabs(r.trace_value - r.l1_row_rate);
  r.max_abs_entry = yp.cwiseAbs().maxCoeff();
  r.min_eigenvalue = lanczos_min_eigenvalue(yp);
  r.holds = r.trace_identity_dev <= 1e-8 * n && r.max_abs_entry <= 4.0 + 1e-8 &&
            r.min_eigenvalue >= -1e-8;
  if (!r.holds) {
    if (r.trace_identity_dev > 1e-8 * n)
      throw FactViolation("trace identity Tr[P_Tperp(Y)] = (1/n)||Y-Y*||_1 violated");
    if (r.max_abs_entry > 4.0 + 1e-8)
      throw FactViolation("entrywise bound ||P_Tperp(Y)||_inf <= 4 violated");
    throw FactViolation("P_Tperp(Y) not positive semidefinite");
  }
  return r;
}

BasicInequalityReport check_basic_inequality(const SdpSolution& sol, const Observation& obs,
                                             const LabelVector& truth,
                                             const ModelParams& model,
                                             const SnrSummary& summary, double tol) {
  const Eigen::MatrixXd yp = project_t_perp(sol.y, truth);
  const DualCertificate cert = dual_certificate(obs, truth, summary);
  const Eigen::MatrixXd noise = obs.values() - expected_adjacency(model, truth);

  BasicInequalityReport r;
  r.s1 = -(cert.d.array() * yp.diagonal().array()).sum();
  r.s2 = (noise.array() * yp.array()).sum();
  // The inequality assumes an exactly balanced Y. A solver that satisfies
  // the balance constraint only to feas_tol leaks lambda* <J, Y> into the
  // sum, so widen the tolerance by that computable amount.
  const int n = obs.n();
  const double balance_slack =
      std::fabs(summary.lambda_star) * sol.feas.balance_dev * static_cast<double>(n) * n;
  r.holds = r.s1 + r.s2 >= -(tol * (1.0 + obs.values().norm()) + balance_slack);
  return r;
}

OrderStatMargin order_statistic_margin(const DualCertificate& cert,
                                       const SnrSummary& summary, int m, int n,
                                       double eta_const) {
  if (m < 1 || m > n) throw ParamError("order statistic index m out of [1, n]");
  std::vector<double> neg_d(cert.d.data(), cert.d.data() + cert.d.size());
  for (double& v : neg_d) v = -v;
  std::partial_sort(neg_d.begin(), neg_d.begin() + m, neg_d.end(), std::greater<>());
  double l_m = 0.0;
  for (int i = 0; i < m; ++i) l_m += neg_d[i];

  const double eta = eta_const / std::sqrt(n * summary.i_star);
  const double r_m =
      ((1.0 + eta) * m * std::log(n * std::exp(1.0) / m) -
       (1.0 - 2.0 * eta) * m * summary.n_bar * summary.i_star) /
      summary.t_star;
  return {l_m, r_m};
}

double certificate_identity_deviation(const DualCertificate& cert, const Observation& obs,
                                      const LabelVector& truth, const SnrSummary& summary) {
  const Eigen::MatrixXd a0 = shifted_adjacency(obs, summary);
  const Eigen::VectorXd s = truth.as_vector();
  const Eigen::VectorXd lhs = cert.d.array() * s.array();  // D sigma*
  const Eigen::VectorXd rhs = a0 * s;
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

double mean_shift_orthogonality(const SdpSolution& sol, const LabelVector& truth,
                                const ModelParams& model, const SnrSummary& summary) {
  const int n = truth.n();
  const Eigen::MatrixXd yp = project_t_perp(sol.y, truth);
  const Eigen::MatrixXd shifted =
      expected_adjacency(model, truth) -
      summary.lambda_star * Eigen::MatrixXd::Ones(n, n);
  return (shifted.array() * yp.array()).sum();
}

}  // namespace sdpclust
