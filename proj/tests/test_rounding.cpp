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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sdpclust/models.hpp"
#include "sdpclust/rng.hpp"
#include "sdpclust/rounding.hpp"

using namespace sdpclust;

namespace {

SdpSolution wrap(Eigen::MatrixXd y) {
  SdpSolution sol;
  sol.y = std::move(y);
  sol.feas = verify_feasibility(sol.y);
  return sol;
}

}  // namespace

TEST_CASE("rounding the truth matrix recovers the labels up to a flip") {
  const LabelVector sig({1, -1, 1, 1, -1, -1, 1, -1});
  const RoundResult r = round_matrix(sig.truth_matrix());
  CHECK_FALSE(r.degenerate);
  CHECK(r.top_eigenvalue == doctest::Approx(8.0).epsilon(1e-10));
  CHECK((r.labels == sig || r.labels == sig.flipped()));
  CHECK(misclustering(r.labels, sig) == 0.0);
}

TEST_CASE("misclustering is flip-invariant and counts minority disagreement") {
  const LabelVector a({1, 1, 1, 1, -1, -1, -1, -1});
  CHECK(misclustering(a, a) == 0.0);
  CHECK(misclustering(a.flipped(), a) == 0.0);
  // One node off: 1/8 either way.
  const LabelVector b({-1, 1, 1, 1, -1, -1, -1, -1});
  CHECK(misclustering(b, a) == doctest::Approx(1.0 / 8.0));
  CHECK(misclustering(b.flipped(), a) == doctest::Approx(1.0 / 8.0));
  // err is min(f, 1-f), never above 1/2.
  const LabelVector c({-1, -1, -1, 1, -1, -1, -1, -1});
  CHECK(misclustering(c, a) <= 0.5);
}

TEST_CASE("rounding is invariant under simultaneous permutation") {
  const LabelVector sig({1, -1, 1, -1, 1, -1});
  Eigen::MatrixXd y = sig.truth_matrix();
  // Mild asymmetric-free perturbation so the eigenvector is unique.
  StreamRng rng(99, 0, 0);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j <= i; ++j) {
      const double d = 0.01 * rng.next_gaussian();
      y(i, j) += d;
      if (i != j) y(j, i) += d;
    }
  const RoundResult base = round_matrix(y);

  std::vector<int> perm = {3, 1, 5, 0, 4, 2};
  Eigen::MatrixXd py(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) py(i, j) = y(perm[i], perm[j]);
  const RoundResult permuted = round_matrix(py);

  std::vector<int> want(6);
  for (int i = 0; i < 6; ++i) want[i] = base.labels[perm[i]];
  const LabelVector want_labels(want);
  CHECK((permuted.labels == want_labels || permuted.labels == want_labels.flipped()));
}

TEST_CASE("identity matrix has a degenerate top eigenspace") {
  const RoundResult r = round_matrix(Eigen::MatrixXd::Identity(8, 8));
  CHECK(r.degenerate);
}

TEST_CASE("spectral-gap robustness: small perturbations keep exact recovery") {
  const ModelParams z2{Z2Params(1.0)};
  const LabelVector sig = generate_labels(50, z2, 7);
  Eigen::MatrixXd y = sig.truth_matrix();
  StreamRng rng(11, 0, 0);
  Eigen::MatrixXd e(50, 50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j <= i; ++j) e(i, j) = e(j, i) = rng.next_gaussian();
  // Perturbation of spectral norm well under half the gap (= n/2 = 25).
  const double scale = 5.0 / std::sqrt(50.0);  // opnorm(e) ~ 2 sqrt(50)
  const RoundResult r = round_matrix(y + scale * e / std::sqrt(50.0));
  CHECK(misclustering(r.labels, sig) == 0.0);
}

TEST_CASE("l1 error report on exact and perturbed solutions") {
  const LabelVector sig({1, -1, -1, 1, 1, -1, 1, -1, -1, 1});
  const SdpSolution exact = wrap(sig.truth_matrix());
  const ErrorReport re = l1_error(exact, sig);
  CHECK(re.l1_rate == 0.0);
  CHECK(re.l1_row_rate == 0.0);

  Eigen::MatrixXd y = sig.truth_matrix();
  y(0, 1) -= 0.5;
  y(1, 0) -= 0.5;
  const ErrorReport rp = l1_error(wrap(y), sig);
  CHECK(rp.l1_rate == doctest::Approx(1.0 / 100.0));
  CHECK(rp.l1_row_rate == doctest::Approx(1.0 / 10.0));
}

TEST_CASE("score_solution merges rounding error with matrix error") {
  const LabelVector sig({1, 1, -1, -1});
  const SdpSolution sol = wrap(sig.truth_matrix());
  const ErrorReport r = score_solution(sol, sig.flipped(), sig);
  CHECK(r.err == 0.0);  // global flip is free
  CHECK(r.exact);
  const ErrorReport bad = score_solution(sol, LabelVector({1, -1, 1, -1}), sig);
  CHECK(bad.err == doctest::Approx(0.5));
}

TEST_CASE("frobenius-l1 comparison for entries bounded by one") {
  // For |Y_ij| <= 1 and |Y*_ij| = 1, |Y - Y*| <= 2 entrywise, hence
  // ||Y - Y*||_F^2 <= 2 ||Y - Y*||_1. Checked on random feasible-looking Y.
  const LabelVector sig = generate_labels(20, ModelParams(Z2Params(1.0)), 3);
  const Eigen::MatrixXd ystar = sig.truth_matrix();
  StreamRng rng(4, 0, 0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd y(20, 20);
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j <= i; ++j)
        y(i, j) = y(j, i) = std::clamp(rng.next_gaussian(), -1.0, 1.0);
    y.diagonal().setOnes();
    const double fro2 = (y - ystar).squaredNorm();
    const double l1 = (y - ystar).cwiseAbs().sum();
    CHECK(fro2 <= 2.0 * l1 + 1e-12);
  }
}

TEST_CASE("rounding a solved instance matches the planted labels") {
  const ModelParams m{CbmParams(0.9, 0.05)};
  const LabelVector sig = generate_labels(24, m, 13);
  const Observation obs = generate_observation(sig, m, 14);
  const SdpSolution sol = solve_low_rank(obs, SdpVariant::Basic);
  const RoundResult r = round_solution(sol);
  CHECK(misclustering(r.labels, sig) == 0.0);
  const ErrorReport rep = score_solution(sol, r.labels, sig);
  CHECK(rep.err == 0.0);
  CHECK(rep.l1_rate <= 1e-5);
}
