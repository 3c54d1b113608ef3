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

#include "sdpclust/oracles.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

#include "sdpclust/rng.hpp"
#include "sdpclust/snr.hpp"

namespace sdpclust {

MleResult brute_force_mle(const Observation& obs, SdpVariant variant) {
  const int n = obs.n();
  const int limit = variant == SdpVariant::Basic ? 22 : 26;
  if (n > limit) throw SizeError("brute-force MLE limited to n <= " + std::to_string(limit));
  if (n < 2) throw SizeError("brute-force MLE needs n >= 2");
  const Eigen::MatrixXd& a = obs.values();

  // sigma_1 fixed to +1; Gray code over the remaining n-1 nodes with
  // single-flip objective updates.
  std::vector<int> sigma(n, 1);
  Eigen::VectorXd s = a.rowwise().sum();  // A * sigma
  double obj = 0.0;
  for (int i = 0; i < n; ++i) obj += s[i];  // sigma^T A sigma with sigma = 1
  int plus_count = n;

  double best_obj = -std::numeric_limits<double>::infinity();
  std::vector<int> best_sigma;
  std::uint64_t ties = 0;

  auto consider = [&]() {
    if (variant == SdpVariant::Balanced && 2 * plus_count != n) return;
    if (obj > best_obj) {
      best_obj = obj;
      best_sigma = sigma;
      ties = 1;
    } else if (obj == best_obj) {
      ++ties;
      if (sigma < best_sigma) best_sigma = sigma;
    }
  };

  consider();
  const std::uint64_t total = 1ULL << (n - 1);
  for (std::uint64_t t = 1; t < total; ++t) {
    const int i = std::countr_zero(t) + 1;  // node to flip (node 0 pinned)
    obj -= 4.0 * sigma[i] * s[i];
    s -= 2.0 * sigma[i] * a.col(i);
    plus_count -= sigma[i];
    sigma[i] = -sigma[i];
    consider();
  }

  if (best_sigma.empty()) throw BalanceError("no balanced sign vector exists");
  return {LabelVector(std::move(best_sigma)), best_obj, ties};
}

int bayes_vote_single_node(const Observation& obs, const LabelVector& truth_rest) {
  if (obs.kind() == ObsKind::SbmBinary)
    throw KindError("single-node Bayes vote is defined for Z2/CBM");
  const int n = obs.n();
  if (truth_rest.n() != n - 1) throw ParamError("truth_rest must cover nodes 2..n");
  double agree = 0.0, disagree = 0.0;
  for (int u = 1; u < n; ++u) {
    if (truth_rest[u - 1] == 1)
      agree += obs.values()(0, u);
    else
      disagree += obs.values()(0, u);
  }
  return agree >= disagree ? 1 : -1;
}

TailResult lower_bound_tail(const ModelParams& model, int n, std::uint64_t trials,
                            std::uint64_t seed) {
  const SnrSummary summary = snr_summary(model, n);
  const double required = 100.0 * std::exp(summary.n_bar * summary.i_star);
  if (static_cast<double>(trials) < required)
    throw BudgetError("trial budget too small for the configured tail probability",
                      required);

  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    StreamRng rng(seed, 0x7a11u, t);
    double sum = 0.0;
    for (int i = 0; i < n - 1; ++i) sum -= sample_entry_variable(model, rng);
    if (sum >= 0.0) ++hits;
  }
  TailResult r;
  r.p_hat = static_cast<double>(hits) / static_cast<double>(trials);
  r.bound = std::exp(-(n - 1) * summary.i_star);
  return r;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double tail_exact_z2(double sigma2, int n) {
  // Sum of n-1 copies of N(-1, sigma2) is N(-(n-1), (n-1) sigma2).
  return normal_cdf(-std::sqrt(static_cast<double>(n - 1) / sigma2));
}

double tail_exact_cbm(double alpha, double eps, int n) {
  const CbmParams params(alpha, eps);
  const int m = n - 1;
  // -H takes value -1 w.p. p, +1 w.p. q, 0 w.p. 1-alpha.
  const long double p = params.p(), q = params.q(), z = 1.0L - alpha;
  std::vector<long double> dist(2 * m + 1, 0.0L);
  dist[m] = 1.0L;  // offset by m: index k <-> sum value k - m
  for (int step = 0; step < m; ++step) {
    std::vector<long double> next(2 * m + 1, 0.0L);
    for (int k = 0; k <= 2 * m; ++k) {
      if (dist[k] == 0.0L) continue;
      if (k - 1 >= 0) next[k - 1] += dist[k] * p;
      next[k] += dist[k] * z;
      if (k + 1 <= 2 * m) next[k + 1] += dist[k] * q;
    }
    dist.swap(next);
  }
  long double tail = 0.0L;
  for (int k = m; k <= 2 * m; ++k) tail += dist[k];
  return static_cast<double>(tail);
}

}  // namespace sdpclust
