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
#include <vector>

#include "sdpclust/diagnostics.hpp"
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

// Deliberately naive O(n^2) recomputation of the diagonal certificate.
Eigen::VectorXd naive_certificate(const Observation& obs, const LabelVector& truth,
                                  const SnrSummary& s) {
  const int n = obs.n();
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      acc += truth[i] * (obs.values()(i, j) - s.lambda_star) * truth[j];
    }
    // The diagonal term of the shifted adjacency is -lambda*.
    acc += truth[i] * (0.0 - s.lambda_star) * truth[i];
    d[i] = acc;
  }
  return d;
}

}  // namespace

TEST_CASE("dual certificate matches the naive oracle") {
  const std::vector<ModelParams> models = {ModelParams(Z2Params(0.7)),
                                           ModelParams(CbmParams(0.8, 0.1)),
                                           ModelParams(SbmParams(0.7, 0.2))};
  for (const auto& m : models) {
    const LabelVector sig = generate_labels(20, m, 5);
    const Observation obs = generate_observation(sig, m, 6);
    const SnrSummary s = snr_summary(m, 20);
    const DualCertificate cert = dual_certificate(obs, sig, s);
    const Eigen::VectorXd want = naive_certificate(obs, sig, s);
    CHECK((cert.d - want).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + want.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("noiseless certificate is n-1 at every node") {
  const LabelVector sig({1, -1, 1, -1, 1, -1, 1, -1, 1, -1});
  const ModelParams m{CbmParams(1.0, 1e-12)};
  const Observation obs = generate_observation(sig, m, 9);
  const DualCertificate cert = dual_certificate(obs, sig, snr_summary(m, 10));
  CHECK((cert.d.array() - 9.0).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("tangent projections decompose the identity") {
  const LabelVector sig = generate_labels(16, ModelParams(SbmParams(0.7, 0.2)), 3);
  StreamRng rng(8, 0, 0);
  Eigen::MatrixXd m(16, 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = rng.next_gaussian();

  const Eigen::MatrixXd pt = project_t(m, sig);
  const Eigen::MatrixXd ptp = project_t_perp(m, sig);
  CHECK((pt + ptp - m).cwiseAbs().maxCoeff() <= 1e-12);
  // Idempotence and orthogonality of the complement projection.
  CHECK((project_t_perp(ptp, sig) - ptp).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((project_t_perp(pt, sig)).cwiseAbs().maxCoeff() <= 1e-12);
  // For balanced labels the all-ones matrix is already orthogonal to the
  // spike direction, so it is a fixed point of the complement projection.
  const Eigen::MatrixXd j = Eigen::MatrixXd::Ones(16, 16);
  CHECK((project_t_perp(j, sig) - j).cwiseAbs().maxCoeff() <= 1e-12);

  Eigen::MatrixXd asym = m;
  asym(0, 1) += 1.0;
  CHECK_THROWS_AS(project_t_perp(asym, sig), SymmetryError);
}

TEST_CASE("trace identity on hand-built interpolants") {
  const LabelVector sig = generate_labels(12, ModelParams(Z2Params(1.0)), 21);
  const Eigen::MatrixXd ystar = sig.truth_matrix();
  for (double t : {0.0, 0.1, 0.5, 0.9}) {
    const Eigen::MatrixXd y = (1.0 - t) * ystar + t * Eigen::MatrixXd::Identity(12, 12);
    const SdpSolution sol = wrap(y);
    const PtPerpFactsReport rep = check_ptperp_facts(sol, sig);
    CHECK(rep.holds);
    // Both sides equal t (n - 1) for this family.
    CHECK(rep.trace_value == doctest::Approx(t * 11.0).epsilon(1e-10));
    CHECK(rep.l1_row_rate == doctest::Approx(t * 11.0).epsilon(1e-10));
    CHECK(rep.trace_identity_dev <= 1e-10);
    CHECK(rep.max_abs_entry <= 4.0);
    CHECK(rep.min_eigenvalue >= -1e-9);
  }
}

TEST_CASE("expected adjacency is an exact combination of truth and ones") {
  const ModelParams sbm{SbmParams(0.7, 0.2)};
  const LabelVector sig = generate_labels(10, sbm, 31);
  const Eigen::MatrixXd ea = expected_adjacency(sbm, sig);
  const Eigen::MatrixXd want = 0.45 * Eigen::MatrixXd::Ones(10, 10) +
                               0.25 * sig.truth_matrix();
  CHECK((ea - want).cwiseAbs().maxCoeff() <= 1e-14);

  const ModelParams z2{Z2Params(0.5)};
  const LabelVector s2 = generate_labels(10, z2, 32);
  CHECK((expected_adjacency(z2, s2) - s2.truth_matrix()).cwiseAbs().maxCoeff() == 0.0);

  const ModelParams cbm{CbmParams(0.8, 0.1)};
  // E a_ij = alpha (1 - 2 eps) sigma_i sigma_j.
  CHECK((expected_adjacency(cbm, s2) - 0.64 * s2.truth_matrix()).cwiseAbs().maxCoeff() <=
        1e-14);
}

TEST_CASE("mean-shift orthogonality vanishes for feasible solutions") {
  const ModelParams sbm{SbmParams(0.8, 0.15)};
  const LabelVector sig = generate_labels(24, sbm, 41);
  const Observation obs = generate_observation(sig, sbm, 42);
  const SnrSummary s = snr_summary(sbm, 24);
  const SdpSolution sol = solve_low_rank(obs, SdpVariant::Balanced);
  CHECK(std::fabs(mean_shift_orthogonality(sol, sig, sbm, s)) <=
        1e-6 * 24.0 * 24.0 + 1e-8);
}

TEST_CASE("certificate identity deviation is at machine scale") {
  const std::vector<ModelParams> models = {ModelParams(Z2Params(0.7)),
                                           ModelParams(CbmParams(0.8, 0.1)),
                                           ModelParams(SbmParams(0.7, 0.2))};
  for (const auto& m : models) {
    const LabelVector sig = generate_labels(30, m, 51);
    const Observation obs = generate_observation(sig, m, 52);
    const SnrSummary s = snr_summary(m, 30);
    const DualCertificate cert = dual_certificate(obs, sig, s);
    CHECK(certificate_identity_deviation(cert, obs, sig, s) <= 1e-10);
  }
}

TEST_CASE("basic inequality holds on solved strong-signal instances") {
  const std::vector<ModelParams> models = {ModelParams(Z2Params(0.8)),
                                           ModelParams(CbmParams(0.8, 0.15)),
                                           ModelParams(SbmParams(0.85, 0.1))};
  for (const auto& m : models) {
    const LabelVector sig = generate_labels(30, m, 61);
    const Observation obs = generate_observation(sig, m, 62);
    const SnrSummary s = snr_summary(m, 30);
    const SdpSolution sol = solve_low_rank(obs, default_variant(obs.kind()));
    const BasicInequalityReport rep = check_basic_inequality(sol, obs, sig, m, s);
    CHECK(rep.holds);
  }
}

TEST_CASE("order statistic margin: l_m versus exhaustive subsets") {
  const ModelParams m{Z2Params(1.2)};
  const LabelVector sig = generate_labels(12, m, 71);
  const Observation obs = generate_observation(sig, m, 72);
  const SnrSummary s = snr_summary(m, 12);
  const DualCertificate cert = dual_certificate(obs, sig, s);

  // Exhaustive maximum of sum_{i in S} (-d_i) over |S| = 3 subsets.
  double best = -1e300;
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j)
      for (int k = j + 1; k < 12; ++k)
        best = std::max(best, -cert.d[i] - cert.d[j] - cert.d[k]);
  const OrderStatMargin m3 = order_statistic_margin(cert, s, 3, 12, 0.1);
  CHECK(m3.l_m == doctest::Approx(best).epsilon(1e-12));

  // l_m is concave in m: increments (the sorted -d_i) are nonincreasing.
  double prev_inc = 1e300, prev_l = 0.0;
  for (int mm = 1; mm <= 12; ++mm) {
    const OrderStatMargin om = order_statistic_margin(cert, s, mm, 12, 0.1);
    const double inc = om.l_m - prev_l;
    CHECK(inc <= prev_inc + 1e-12);
    prev_inc = inc;
    prev_l = om.l_m;
  }
  // Independent recomputation of the reference threshold r_m.
  const double eta = 0.1 / std::sqrt(12.0 * s.i_star);
  const double want_r = ((1.0 + eta) * 3.0 * std::log(12.0 * std::exp(1.0) / 3.0) -
                         (1.0 - 2.0 * eta) * 3.0 * s.n_bar * s.i_star) /
                        s.t_star;
  CHECK(m3.r_m == doctest::Approx(want_r).epsilon(1e-13));
  CHECK_THROWS_AS(order_statistic_margin(cert, s, 0, 12, 0.1), ParamError);
  CHECK_THROWS_AS(order_statistic_margin(cert, s, 13, 12, 0.1), ParamError);
}

TEST_CASE("margin comparison across strong-signal instances") {
  // Above the recovery threshold, no node margin should exceed the
  // reference threshold for small m across a batch of instances.
  const ModelParams m{Z2Params(0.3)};
  const SnrSummary s = snr_summary(m, 60);
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const LabelVector sig = generate_labels(60, m, 1000 + seed);
    const Observation obs = generate_observation(sig, m, 2000 + seed);
    const DualCertificate cert = dual_certificate(obs, sig, s);
    for (int mm : {1, 2, 4}) {
      const OrderStatMargin om = order_statistic_margin(cert, s, mm, 60, 0.1);
      if (om.l_m > om.r_m) ++violations;
    }
  }
  CHECK(violations == 0);
}
