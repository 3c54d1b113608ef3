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

#include "sdpclust/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "sdpclust/rng.hpp"

namespace sdpclust {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Orthogonal projection onto {diag(Y) = 1} and, for Balanced, onto
// {diag(Y) = 1, <Y,J> = 0}. The two constraints decouple: the diagonal is
// fixed first, then the off-diagonal block is shifted by the constant
// (sum_offdiag + n) / (n^2 - n), which is the least-squares projection
// onto the remaining linear constraint.
void project_affine(Eigen::MatrixXd& y, SdpVariant variant) {
  const int n = static_cast<int>(y.rows());
  y.diagonal().setOnes();
  if (variant == SdpVariant::Balanced) {
    const double off_sum = y.sum() - static_cast<double>(n);
    const double shift = (off_sum + n) / (static_cast<double>(n) * n - n);
    y.array() -= shift;
    y.diagonal().setOnes();
  }
}

void project_psd(Eigen::MatrixXd& y) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(y);
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  y = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  y = 0.5 * (y + y.transpose());
}

// Final polish: exact unit diagonal and entries clamped to [-1, 1]. Both
// perturbations are bounded by the primal residual at convergence, so the
// independent feasibility check below stays within feas_tol.
void polish(Eigen::MatrixXd& y) {
  y = 0.5 * (y + y.transpose());
  y = y.cwiseMax(-1.0).cwiseMin(1.0);
  y.diagonal().setOnes();
}

}  // namespace

SdpVariant default_variant(ObsKind kind) {
  return kind == ObsKind::SbmBinary ? SdpVariant::Balanced : SdpVariant::Basic;
}

double lanczos_min_eigenvalue(const Eigen::MatrixXd& m, int max_iters, double tol) {
  const int n = static_cast<int>(m.rows());
  if (n == 1) return m(0, 0);
  // Largest eigenvalue of cI - M gives the smallest of M; c from Gershgorin.
  const double c = m.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  const int steps = std::min(max_iters, n);

  Eigen::MatrixXd basis(n, steps);
  Eigen::VectorXd alpha(steps), beta(steps);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i) v[i] += (i % 2 == 0 ? 1.0 : -1.0) * 1e-3 * (i + 1) / n;
  v.normalize();

  double prev_ritz = 0.0;
  int k = 0;
  for (; k < steps; ++k) {
    basis.col(k) = v;
    Eigen::VectorXd w = c * v - m * v;
    alpha[k] = v.dot(w);
    w -= alpha[k] * v;
    if (k > 0) w -= beta[k - 1] * basis.col(k - 1);
    // Full re-orthogonalization.
    w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
    beta[k] = w.norm();

    if (k >= 1) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k + 1, k + 1);
      for (int i = 0; i <= k; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 <= k) t(i, i + 1) = t(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
      const double ritz = eig.eigenvalues().maxCoeff();
      if (std::fabs(ritz - prev_ritz) <= tol * (1.0 + std::fabs(ritz)) &&
          beta[k] <= tol * c)
        return c - ritz;
      prev_ritz = ritz;
    }
    if (beta[k] <= 1e-14 * c) break;  // invariant subspace found
    v = w / beta[k];
  }
  const int dim = std::min(k + 1, steps);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < dim) t(i, i + 1) = t(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
  return c - eig.eigenvalues().maxCoeff();
}

FeasReport verify_feasibility(const Eigen::MatrixXd& y) {
  FeasReport r;
  const int n = static_cast<int>(y.rows());
  r.max_diag_dev = (y.diagonal().array() - 1.0).abs().maxCoeff();
  r.balance_dev = std::fabs(y.sum()) / (static_cast<double>(n) * n);
  r.max_abs_entry = y.cwiseAbs().maxCoeff();
  r.min_eigenvalue = lanczos_min_eigenvalue(y);
  return r;
}

SdpSolution solve_admm(const Observation& obs, SdpVariant variant, const AdmmConfig& cfg) {
  const auto t0 = Clock::now();
  const int n = obs.n();
  if (n < 2) throw SizeError("ADMM needs n >= 2");
  const Eigen::MatrixXd& a = obs.values();

  double rho = cfg.penalty > 0.0 ? cfg.penalty : 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd z = x;
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);

  // Stop when residuals are far below feas_tol: the objective deficit of
  // the polished iterate tracks the terminal residual, and it must stay
  // under the certification tolerance, not just the feasibility one.
  const double res_tol = 1e-4 * cfg.feas_tol * n;

  SolverStats stats;
  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    x = z - u + a / rho;
    project_affine(x, variant);

    const Eigen::MatrixXd z_prev = z;
    z = x + u;
    project_psd(z);

    u += x - z;

    stats.primal_residual = (x - z).norm();
    stats.dual_residual = rho * (z - z_prev).norm();
    if (stats.primal_residual <= res_tol && stats.dual_residual <= res_tol) {
      stats.converged = true;
      ++iter;
      break;
    }
    // Residual balancing is only active during a warm-up phase: each rho
    // change rescales the dual variable and perturbs the iteration, and
    // late-stage ping-ponging between the two branches prevents
    // convergence outright.
    if (cfg.adaptive_penalty && iter < 100 && iter % 10 == 9) {
      if (stats.primal_residual > 10.0 * stats.dual_residual) {
        rho *= 2.0;
        u *= 0.5;
      } else if (stats.dual_residual > 10.0 * stats.primal_residual) {
        rho *= 0.5;
        u *= 2.0;
      }
    }
  }
  stats.iterations = iter;

  SdpSolution sol;
  sol.y = z;
  polish(sol.y);
  sol.objective = (a.array() * sol.y.array()).sum();
  sol.feas = verify_feasibility(sol.y);
  stats.wall_time_s = seconds_since(t0);
  sol.stats = stats;
  return sol;
}

namespace {

struct AscentResult {
  Eigen::MatrixXd v;
  double objective;
  bool grad_converged;
  int iterations;
};

// Gradient ascent for max tr(V^T A V) over factors V with unit-norm rows.
// For the Balanced variant the constraint <VV^T, J> = ||V^T 1||^2 = 0 is
// enforced exactly as the linear condition 1^T V = 0 on the factor: the
// search direction is projected onto it and the retraction restores it.
// (A penalty or multiplier formulation fails here: the constraint's
// gradient vanishes on the constraint set, and degenerate instances have
// effectively unbounded multipliers.)
void retract(Eigen::MatrixXd& v, bool balanced) {
  if (!balanced) {
    v.rowwise().normalize();
    return;
  }
  const int n = static_cast<int>(v.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    v.rowwise() -= v.colwise().mean();
    v.rowwise().normalize();
    if (v.colwise().sum().norm() <= 1e-14 * n) break;
  }
}

AscentResult ascend(const Eigen::MatrixXd& a, Eigen::MatrixXd v, bool balanced,
                    int max_iters, double grad_tol) {
  const int n = static_cast<int>(a.rows());

  auto objective_of = [&](const Eigen::MatrixXd& w) {
    return (w.transpose() * (a * w)).trace();
  };

  retract(v, balanced);
  double f = objective_of(v);
  double step = 1.0 / (a.cwiseAbs().rowwise().sum().maxCoeff() + 1.0);
  bool grad_converged = false;
  int iters_used = 0;
  // Degenerate optima have gradients that decay only sublinearly, so also
  // stop once the objective stalls at numerical resolution over a window.
  double f_window = f;

  for (int iter = 0; iter < max_iters; ++iter) {
    iters_used = iter + 1;
    if (iter % 200 == 199) {
      if (f - f_window <= 1e-10 * (1.0 + std::fabs(f))) {
        grad_converged = true;
        break;
      }
      f_window = f;
    }
    Eigen::MatrixXd r = 2.0 * (a * v);
    // Alternating projection onto the tangent space of the intersection:
    // zero column sums (Balanced only) and rows orthogonal to those of v.
    for (int rep = 0; rep < 3; ++rep) {
      if (balanced) r.rowwise() -= r.colwise().mean();
      const Eigen::VectorXd radial = (r.array() * v.array()).rowwise().sum();
      r -= radial.asDiagonal() * v;
    }

    const double gnorm = r.norm();
    if (gnorm <= grad_tol * (1.0 + std::fabs(f)) * std::sqrt(static_cast<double>(n))) {
      grad_converged = true;
      break;
    }

    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      Eigen::MatrixXd w = v + step * r;
      retract(w, balanced);
      const double f_try = objective_of(w);
      if (f_try > f) {
        v = std::move(w);
        f = f_try;
        step *= 1.5;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      grad_converged = true;  // no ascent direction at line-search resolution
      break;
    }
  }
  const double raw_objective = objective_of(v);
  return {std::move(v), raw_objective, grad_converged, iters_used};
}

}  // namespace

SdpSolution solve_low_rank(const Observation& obs, SdpVariant variant,
                           const LowRankConfig& cfg) {
  const auto t0 = Clock::now();
  const int n = obs.n();
  const Eigen::MatrixXd& a = obs.values();
  if (n < 2) throw SizeError("low-rank solver needs n >= 2");
  const int k = cfg.rank > 0
                    ? cfg.rank
                    : static_cast<int>(std::ceil(std::sqrt(2.0 * n)));
  if (k < 1) throw SizeError("low-rank solver needs rank >= 1");
  const double n2 = static_cast<double>(n) * n;

  Eigen::MatrixXd best_v;
  double best_obj = -std::numeric_limits<double>::infinity();
  bool best_converged = false;
  int total_iters = 0;

  for (int restart = 0; restart < std::max(1, cfg.restarts); ++restart) {
    StreamRng rng(cfg.seed, 0x10774a2cULL, static_cast<std::uint64_t>(restart));
    Eigen::MatrixXd v(n, k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) v(i, j) = rng.next_gaussian();
    v.rowwise().normalize();

    const bool balanced = variant == SdpVariant::Balanced;
    auto res = ascend(a, std::move(v), balanced, cfg.max_iters, cfg.grad_tol);
    v = std::move(res.v);
    total_iters += res.iterations;
    bool converged = res.grad_converged;
    if (balanced)
      converged = converged && v.colwise().sum().squaredNorm() <= cfg.feas_tol * n2;

    const double obj = (v.transpose() * (a * v)).trace();
    const bool better = (converged && !best_converged) ||
                        (converged == best_converged && obj > best_obj);
    if (better) {
      best_v = v;
      best_obj = obj;
      best_converged = converged;
    }
  }

  SdpSolution sol;
  sol.y = best_v * best_v.transpose();
  sol.y = 0.5 * (sol.y + sol.y.transpose());
  sol.y = sol.y.cwiseMax(-1.0).cwiseMin(1.0);
  sol.y.diagonal().setOnes();
  sol.objective = (a.array() * sol.y.array()).sum();
  sol.feas = verify_feasibility(sol.y);
  sol.stats.iterations = total_iters;
  sol.stats.converged = best_converged;
  sol.stats.primal_residual = sol.feas.balance_dev;
  sol.stats.wall_time_s = seconds_since(t0);
  return sol;
}

CertResult certify_sublevel(const SdpSolution& sol, const Observation& obs,
                            const LabelVector& truth, SdpVariant variant,
                            double feas_tol, double cert_tol_scale) {
  CertResult r;
  const Eigen::MatrixXd& a = obs.values();
  const Eigen::MatrixXd y_star = truth.truth_matrix();
  r.gap = (a.array() * sol.y.array()).sum() - (a.array() * y_star.array()).sum();

  const FeasReport& f = sol.feas;
  r.feasible = f.max_diag_dev <= feas_tol && f.min_eigenvalue >= -feas_tol &&
               f.max_abs_entry <= 1.0 + feas_tol &&
               (variant != SdpVariant::Balanced || f.balance_dev <= feas_tol);

  const double cert_tol = cert_tol_scale * a.norm();
  r.member = r.feasible && r.gap >= -cert_tol;
  return r;
}

CouplingResult coupling_check(const SdpSolution& sol, const Observation& obs_original,
                              const Observation& obs_adversarial, const LabelVector& truth,
                              double cert_tol_scale) {
  CouplingResult r;
  const Eigen::MatrixXd y_star = truth.truth_matrix();
  const Eigen::MatrixXd diff = sol.y - y_star;
  r.adversarial_gap = (obs_adversarial.values().array() * diff.array()).sum();
  r.original_gap = (obs_original.values().array() * diff.array()).sum();
  const double tol = cert_tol_scale * obs_original.values().norm();
  r.inequality_holds = r.adversarial_gap <= r.original_gap + tol;
  // Membership under the adversarial matrix must imply membership under
  // the original (feasibility is shared between the two programs).
  const bool member_sr = r.adversarial_gap >= -tol;
  const bool member_orig = r.original_gap >= -tol;
  r.membership_transfers = !member_sr || member_orig;
  return r;
}

}  // namespace sdpclust
