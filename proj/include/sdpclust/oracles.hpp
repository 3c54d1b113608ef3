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

#ifndef SDPCLUST_ORACLES_HPP
#define SDPCLUST_ORACLES_HPP

#include <cstdint>

#include "sdpclust/models.hpp"
#include "sdpclust/sdp.hpp"

namespace sdpclust {

struct MleResult {
  LabelVector labels;
  double objective = 0.0;
  std::uint64_t ties = 0;  // distinct optima up to global flip
};

// Exhaustive maximizer of <A, sigma sigma^T> over sign vectors (balanced
// vectors for the Balanced program). sigma_1 = +1 quotients the global
// flip; enumeration walks a Gray code with O(n) objective updates.
// Ties break to the lexicographically smallest maximizer (-1 < +1).
MleResult brute_force_mle(const Observation& obs, SdpVariant variant);

// Bayes-optimal single-node decision (Z2/CBM): compares the sum of first-
// row entries over nodes agreeing with the +1 hypothesis against those
// disagreeing; ties go to +1.
int bayes_vote_single_node(const Observation& obs, const LabelVector& truth_rest);

struct TailResult {
  double p_hat = 0.0;   // Monte Carlo estimate of P(sum of n-1 copies of -H >= 0)
  double bound = 0.0;   // reference value exp(-(n-1) I*)
};

TailResult lower_bound_tail(const ModelParams& model, int n, std::uint64_t trials,
                            std::uint64_t seed);

// Exact closed forms for the same tail, used as oracles.
double tail_exact_z2(double sigma2, int n);
// Exact convolution of the ternary pmf over n-1 entries.
double tail_exact_cbm(double alpha, double eps, int n);

double normal_cdf(double x);

}  // namespace sdpclust

#endif  // SDPCLUST_ORACLES_HPP
