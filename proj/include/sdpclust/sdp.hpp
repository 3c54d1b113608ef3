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

#ifndef SDPCLUST_SDP_HPP
#define SDPCLUST_SDP_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "sdpclust/models.hpp"
#include "sdpclust/snr.hpp"

namespace sdpclust {

// Basic:    max <A,Y>  s.t. Y psd, Y_ii = 1
// Balanced: additionally <Y,J> = 0 (paired with SBM-kind observations)
enum class SdpVariant { Basic, Balanced };

SdpVariant default_variant(ObsKind kind);

struct SolverStats {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double wall_time_s = 0.0;
  bool converged = false;
};

struct FeasReport {
  double max_diag_dev = 0.0;   // max |Y_ii - 1|
  double min_eigenvalue = 0.0; // Lanczos estimate, independent of the solver
  double balance_dev = 0.0;    // |<Y,J>| / n^2
  double max_abs_entry = 0.0;
};

struct SdpSolution {
  Eigen::MatrixXd y;
  double objective = 0.0;
  SolverStats stats;
  FeasReport feas;
};

struct AdmmConfig {
  double feas_tol = 1e-6;
  int max_iters = 20000;
  double penalty = 0.0;        // 0 -> 1/sqrt(n)
  bool adaptive_penalty = true;
};

struct LowRankConfig {
  int rank = 0;                // 0 -> ceil(sqrt(2n))
  int max_iters = 2000;
  int restarts = 3;
  double grad_tol = 1e-7;      // relative Riemannian gradient norm
  double feas_tol = 1e-6;
  std::uint64_t seed = 1;
  int balance_rounds = 12;     // augmented Lagrangian outer rounds (Balanced)
};

// Consensus ADMM: PSD projection via full eigendecomposition, affine
// projection onto {diag = 1} (plus the balance constraint), dual update.
SdpSolution solve_admm(const Observation& obs, SdpVariant variant,
                       const AdmmConfig& cfg = {});

// Riemannian gradient ascent on <A, VV^T> over unit-row-norm factors V;
// the balance constraint is handled by an augmented Lagrangian.
SdpSolution solve_low_rank(const Observation& obs, SdpVariant variant,
                           const LowRankConfig& cfg = {});

struct CertResult {
  bool member = false;
  double gap = 0.0;  // <A, Y> - <A, Y*>
  bool feasible = false;
};

// Membership in the sublevel set of feasible solutions whose objective is
// no worse than the ground truth's. cert_tol = cert_tol_scale * ||A||_F.
CertResult certify_sublevel(const SdpSolution& sol, const Observation& obs,
                            const LabelVector& truth, SdpVariant variant,
                            double feas_tol = 1e-6, double cert_tol_scale = 1e-8);

struct CouplingResult {
  bool inequality_holds = false;     // <A^SR, Y-Y*> <= <A, Y-Y*>
  bool membership_transfers = false; // member under A^SR => member under A
  double adversarial_gap = 0.0;
  double original_gap = 0.0;
};

CouplingResult coupling_check(const SdpSolution& sol, const Observation& obs_original,
                              const Observation& obs_adversarial, const LabelVector& truth,
                              double cert_tol_scale = 1e-8);

// Smallest eigenvalue via Lanczos with full re-orthogonalization; used to
// re-verify feasibility independently of solver internals.
double lanczos_min_eigenvalue(const Eigen::MatrixXd& m, int max_iters = 200,
                              double tol = 1e-10);

FeasReport verify_feasibility(const Eigen::MatrixXd& y);

}  // namespace sdpclust

#endif  // SDPCLUST_SDP_HPP
