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

#ifndef SDPCLUST_SNR_HPP
#define SDPCLUST_SNR_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "sdpclust/models.hpp"
#include "sdpclust/rng.hpp"

namespace sdpclust {

// Signal-to-noise summary of a model instance.
//   i_star      order-1/2 Renyi-type divergence between the same-cluster
//               and cross-cluster entry laws; governs the error exponent
//   t_star      minimizer of t -> E exp(-tH), H the model's entry variable
//   lambda_star adjacency shift, nonzero only for SBM
//   n_bar       effective size (n for Z2/CBM, n/2 for SBM)
struct SnrSummary {
  double i_star;
  double t_star;
  double lambda_star;
  double n_bar;
};

SnrSummary snr_summary(const ModelParams& model, int n);

// A - lambda_star * J (J all-ones); identical to A for Z2/CBM.
Eigen::MatrixXd shifted_adjacency(const Observation& obs, const SnrSummary& summary);

struct IdentityCheck {
  std::string name;
  double lhs;
  double rhs;
  double deviation;
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  double max_deviation = 0.0;
};

// Closed-form moment-generating-function identities per model, evaluated
// in extended precision. Throws IdentityViolation if any deviation
// exceeds tol.
IdentityReport check_mgf_identities(const ModelParams& model, double tol);

struct EstimateCheck {
  std::string name;
  double slack;  // >= 0 when the estimate holds
  bool holds;
};

// Bracket/ordering estimates for CBM and SBM parameters. Throws
// EstimateViolation on failure.
std::vector<EstimateCheck> check_snr_estimates(const ModelParams& model);

// Draw one sample of the entry variable H for the model.
double sample_entry_variable(const ModelParams& model, StreamRng& rng);

// E exp(-t H) in closed form.
double entry_mgf(const ModelParams& model, double t);

}  // namespace sdpclust

#endif  // SDPCLUST_SNR_HPP
