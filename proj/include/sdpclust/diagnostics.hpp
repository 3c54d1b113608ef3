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

#ifndef SDPCLUST_DIAGNOSTICS_HPP
#define SDPCLUST_DIAGNOSTICS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sdpclust/models.hpp"
#include "sdpclust/sdp.hpp"
#include "sdpclust/snr.hpp"

namespace sdpclust {

// Diagonal dual certificate: d_i = sigma*_i sum_j (A_ij - lambda*) sigma*_j.
struct DualCertificate {
  Eigen::VectorXd d;
};

DualCertificate dual_certificate(const Observation& obs, const LabelVector& truth,
                                 const SnrSummary& summary);

// Projection onto the orthogonal complement of the tangent space at Y*:
// (I - UU^T) M (I - UU^T) with U = sigma*/sqrt(n). Throws SymmetryError
// if M is asymmetric beyond 1e-12.
Eigen::MatrixXd project_t_perp(const Eigen::MatrixXd& m, const LabelVector& truth);
Eigen::MatrixXd project_t(const Eigen::MatrixXd& m, const LabelVector& truth);

// Expected observation matrix under the entry laws (diagonal included, so
// that E A is an exact linear combination of Y* and J). Computed
// analytically from the parameters, never estimated.
Eigen::MatrixXd expected_adjacency(const ModelParams& model, const LabelVector& truth);

struct PtPerpFactsReport {
  double trace_value = 0.0;
  double l1_row_rate = 0.0;
  double trace_identity_dev = 0.0;
  double max_abs_entry = 0.0;
  double min_eigenvalue = 0.0;
  bool holds = false;
};

// Trace identity Tr[P_Tperp(Y)] = (1/n)||Y - Y*||_1, entrywise bound
// ||P_Tperp(Y)||_inf <= 4, and positive semidefiniteness. Throws
// FactViolation on failure.
PtPerpFactsReport check_ptperp_facts(const SdpSolution& sol, const LabelVector& truth);

struct BasicInequalityReport {
  double s1 = 0.0;  // <-D, P_Tperp(Y)>
  double s2 = 0.0;  // <A - EA, P_Tperp(Y)>
  bool holds = false;
};

BasicInequalityReport check_basic_inequality(const SdpSolution& sol, const Observation& obs,
                                             const LabelVector& truth,
                                             const ModelParams& model,
                                             const SnrSummary& summary, double tol = 1e-8);

struct OrderStatMargin {
  double l_m;  // sum of the m largest values of -d_i
  double r_m;  // (1/t*)((1+eta) m log(ne/m) - (1-2 eta) m nbar I*)
};

OrderStatMargin order_statistic_margin(const DualCertificate& cert,
                                       const SnrSummary& summary, int m, int n,
                                       double eta_const);

// Certificate identity D sigma* = A0 sigma*; returns max abs deviation.
double certificate_identity_deviation(const DualCertificate& cert, const Observation& obs,
                                      const LabelVector& truth, const SnrSummary& summary);

// <EA - lambda* J, P_Tperp(Y)>; zero in exact arithmetic for feasible Y.
double mean_shift_orthogonality(const SdpSolution& sol, const LabelVector& truth,
                                const ModelParams& model, const SnrSummary& summary);

}  // namespace sdpclust

#endif  // SDPCLUST_DIAGNOSTICS_HPP
