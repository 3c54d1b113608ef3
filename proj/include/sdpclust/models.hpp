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

#ifndef SDPCLUST_MODELS_HPP
#define SDPCLUST_MODELS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sdpclust/errors.hpp"

namespace sdpclust {

// Ground-truth or estimated cluster labels, entries in {-1, +1}.
class LabelVector {
 public:
  LabelVector() = default;
  explicit LabelVector(std::vector<int> entries);

  int n() const { return static_cast<int>(entries_.size()); }
  int operator[](int i) const { return entries_[i]; }
  const std::vector<int>& entries() const { return entries_; }

  bool balanced() const;
  Eigen::VectorXd as_vector() const;
  // Y* = sigma sigma^T (unit diagonal); pass zero_diagonal = true to match
  // the observation convention instead.
  Eigen::MatrixXd truth_matrix(bool zero_diagonal = false) const;

  LabelVector flipped() const;
  bool operator==(const LabelVector& o) const { return entries_ == o.entries_; }

 private:
  std::vector<int> entries_;
};

struct Z2Params {
  double sigma2;  // noise variance
  explicit Z2Params(double sigma2);
};

struct CbmParams {
  double alpha;  // observation probability, (0, 1]
  double eps;    // flip probability, (0, 1/2)
  CbmParams(double alpha, double eps);
  // Shorthands aligning CBM with SBM: p = alpha(1-eps), q = alpha*eps.
  double p() const { return alpha * (1.0 - eps); }
  double q() const { return alpha * eps; }
};

struct SbmParams {
  double p;  // in-cluster edge probability
  double q;  // cross-cluster edge probability, 0 < q < p < 1
  SbmParams(double p, double q);
};

// Bounds for the heterogeneous SBM: q_ij <= q_upper < p_lower <= p_ij.
struct HeteroSbmParams {
  double p_lower;
  double q_upper;
  HeteroSbmParams(double p_lower, double q_upper);
};

using ModelParams = std::variant<Z2Params, CbmParams, SbmParams, HeteroSbmParams>;

enum class ObsKind { Z2Real, CbmTernary, SbmBinary };

std::string kind_name(ObsKind kind);
ObsKind kind_from_name(const std::string& name);
bool model_is_sbm_like(const ModelParams& model);
ObsKind model_kind(const ModelParams& model);
std::string model_name(const ModelParams& model);

// Symmetric observed matrix with zero diagonal. Stored dense; at the
// instance sizes this project targets the dense form is also what the
// solvers consume.
class Observation {
 public:
  Observation(ObsKind kind, Eigen::MatrixXd values);

  int n() const { return static_cast<int>(values_.rows()); }
  ObsKind kind() const { return kind_; }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  ObsKind kind_;
  Eigen::MatrixXd values_;
};

// Set of index pairs (i, j), i < j, the adversary will touch.
class AdversaryPlan {
 public:
  AdversaryPlan() = default;
  explicit AdversaryPlan(std::vector<std::pair<int, int>> pairs, int n);

  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

 private:
  std::vector<std::pair<int, int>> pairs_;
};

LabelVector generate_labels(int n, const ModelParams& model, std::uint64_t seed);

Observation generate_observation(const LabelVector& labels, const ModelParams& model,
                                 std::uint64_t seed);

// Monotone adversary for SBM: on plan pairs, within-cluster entries are
// set to 1 and cross-cluster entries to 0.
Observation apply_monotone_adversary(const Observation& obs, const LabelVector& labels,
                                     const AdversaryPlan& plan);

// Additive adversary for Z2/CBM: a_ij <- a_ij + c_ij * sigma_i sigma_j.
// CBM output leaves the ternary alphabet, so the result is Z2Real.
Observation apply_additive_adversary(const Observation& obs, const LabelVector& labels,
                                     const AdversaryPlan& plan,
                                     const std::vector<double>& magnitudes);

// Heterogeneous SBM with per-pair Bernoulli means. p_of(i,j) is used when
// sigma_i sigma_j = 1 and q_of(i,j) otherwise; bounds are checked
// against `bounds` elementwise.
Observation generate_hetero_sbm(const LabelVector& labels, const HeteroSbmParams& bounds,
                                const Eigen::MatrixXd& p_pair, const Eigen::MatrixXd& q_pair,
                                std::uint64_t seed);

// Built-in adversary strategies.
// Fill all within-cluster pairs and delete all cross-cluster pairs
// incident to a random node subset of size ceil(rho * n).
AdversaryPlan plan_random_neighborhoods(const Observation& obs, const LabelVector& labels,
                                        double rho, std::uint64_t seed);
// Densify the within-cluster neighborhoods of the ceil(rho * n)
// lowest-degree nodes (adaptive: depends on the realized graph).
AdversaryPlan plan_low_degree_densify(const Observation& obs, const LabelVector& labels,
                                      double rho);

// Serialization. Text form: header "n kind", then "i j value" per nonzero
// upper-triangular entry (17 significant digits). Binary form is a
// self-describing container. Both round-trip bit-exactly.
void write_observation_text(const Observation& obs, std::ostream& out);
Observation read_observation_text(std::istream& in);
void write_observation_binary(const Observation& obs, std::ostream& out);
Observation read_observation_binary(std::istream& in);
void save_observation(const Observation& obs, const std::string& path, bool binary);
Observation load_observation(const std::string& path);

}  // namespace sdpclust

#endif  // SDPCLUST_MODELS_HPP
