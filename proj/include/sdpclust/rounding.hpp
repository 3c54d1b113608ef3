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

#ifndef SDPCLUST_ROUNDING_HPP
#define SDPCLUST_ROUNDING_HPP

#include <Eigen/Dense>

#include "sdpclust/models.hpp"
#include "sdpclust/sdp.hpp"

namespace sdpclust {

struct RoundResult {
  LabelVector labels;
  bool degenerate = false;  // top eigenvalue (numerically) not simple
  double top_eigenvalue = 0.0;
};

// Signs of the entries of the top eigenvector of Y (sign of 0 is +1).
// Power iteration with a deterministic start vector; a deflation pass
// estimates the spectral gap and flags degenerate spectra.
RoundResult round_solution(const SdpSolution& sol);
RoundResult round_matrix(const Eigen::MatrixXd& y);

// min over global sign flip of the fraction of disagreeing entries.
double misclustering(const LabelVector& est, const LabelVector& truth);

struct ErrorReport {
  double err = 0.0;          // misclustering rate, min over global flip
  double l1_rate = 0.0;      // (1/n^2) ||Y - Y*||_1
  double l1_row_rate = 0.0;  // (1/n)   ||Y - Y*||_1
  bool exact = false;
};

ErrorReport l1_error(const SdpSolution& sol, const LabelVector& truth);

ErrorReport score_solution(const SdpSolution& sol, const LabelVector& est,
                           const LabelVector& truth);

}  // namespace sdpclust

#endif  // SDPCLUST_ROUNDING_HPP
