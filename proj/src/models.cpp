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

#include "sdpclust/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "sdpclust/rng.hpp"

namespace sdpclust {

LabelVector::LabelVector(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int v : entries_) {
    if (v != 1 && v != -1) throw ParamError("label entries must be +1 or -1");
  }
}

bool LabelVector::balanced() const {
  return std::accumulate(entries_.begin(), entries_.end(), 0) == 0;
}

Eigen::VectorXd LabelVector::as_vector() const {
  Eigen::VectorXd v(n());
  for (int i = 0; i < n(); ++i) v[i] = entries_[i];
  return v;
}

Eigen::MatrixXd LabelVector::truth_matrix(bool zero_diagonal) const {
  const Eigen::VectorXd s = as_vector();
  Eigen::MatrixXd y = s * s.transpose();
  if (zero_diagonal) y.diagonal().setZero();
  return y;
}

LabelVector LabelVector::flipped() const {
  std::vector<int> e = entries_;
  for (int& v : e) v = -v;
  return LabelVector(std::move(e));
}

Z2Params::Z2Params(double s2) : sigma2(s2) {
  if (!(sigma2 > 0.0)) throw ParamError("Z2 sigma2 must be positive");
}

CbmParams::CbmParams(double a, double e) : alpha(a), eps(e) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParamError("CBM alpha must be in (0,1]");
  if (!(eps > 0.0 && eps < 0.5)) throw ParamError("CBM eps must be in (0,1/2)");
}

SbmParams::SbmParams(double p_, double q_) : p(p_), q(q_) {
  if (!(q > 0.0 && q < p && p < 1.0)) throw ParamError("SBM requires 0 < q < p < 1");
}

HeteroSbmParams::HeteroSbmParams(double pl, double qu) : p_lower(pl), q_upper(qu) {
  if (!(qu >= 0.0 && qu < pl && pl <= 1.0))
    throw ParamError("hetero SBM requires 0 <= q_upper < p_lower <= 1");
}

std::string kind_name(ObsKind kind) {
  switch (kind) {
    case ObsKind::Z2Real: return "z2";
    case ObsKind::CbmTernary: return "cbm";
    case ObsKind::SbmBinary: return "sbm";
  }
  return "?";
}

ObsKind kind_from_name(const std::string& name) {
  if (name == "z2") return ObsKind::Z2Real;
  if (name == "cbm") return ObsKind::CbmTernary;
  if (name == "sbm") return ObsKind::SbmBinary;
  throw ParamError("unknown observation kind: " + name);
}

bool model_is_sbm_like(const ModelParams& model) {
  return std::holds_alternative<SbmParams>(model) ||
         std::holds_alternative<HeteroSbmParams>(model);
}

ObsKind model_kind(const ModelParams& model) {
  if (std::holds_alternative<Z2Params>(model)) return ObsKind::Z2Real;
  if (std::holds_alternative<CbmParams>(model)) return ObsKind::CbmTernary;
  return ObsKind::SbmBinary;
}

std::string model_name(const ModelParams& model) {
  if (std::holds_alternative<Z2Params>(model)) return "z2";
  if (std::holds_alternative<CbmParams>(model)) return "cbm";
  if (std::holds_alternative<SbmParams>(model)) return "sbm";
  return "hetero_sbm";
}

Observation::Observation(ObsKind kind, Eigen::MatrixXd values)
    : kind_(kind), values_(std::move(values)) {
  const int n = static_cast<int>(values_.rows());
  if (values_.cols() != n) throw ParamError("observation must be square");
  for (int i = 0; i < n; ++i) {
    if (values_(i, i) != 0.0) throw ParamError("observation diagonal must be zero");
    for (int j = i + 1; j < n; ++j) {
      if (values_(i, j) != values_(j, i)) throw ParamError("observation must be symmetric");
      const double v = values_(i, j);
      if (kind_ == ObsKind::CbmTernary && v != -1.0 && v != 0.0 && v != 1.0)
        throw ParamError("CBM entries must be in {-1,0,1}");
      if (kind_ == ObsKind::SbmBinary && v != 0.0 && v != 1.0)
        throw ParamError("SBM entries must be in {0,1}");
    }
  }
}

AdversaryPlan::AdversaryPlan(std::vector<std::pair<int, int>> pairs, int n)
    : pairs_(std::move(pairs)) {
  std::set<std::pair<int, int>> seen;
  for (const auto& [i, j] : pairs_) {
    if (i < 0 || j < 0 || i >= n || j >= n || i >= j)
      throw ParamError("adversary pair indices must satisfy 0 <= i < j < n");
    if (!seen.insert({i, j}).second) throw ParamError("adversary pair repeated");
  }
}

LabelVector generate_labels(int n, const ModelParams& model, std::uint64_t seed) {
  if (n < 2) throw ParamError("need n >= 2");
  StreamRng rng(seed, /*a=*/0x14be1u);
  std::vector<int> entries(n);
  if (model_is_sbm_like(model)) {
    if (n % 2 != 0) throw BalanceError("balanced SBM labels need even n");
    // Uniform over balanced vectors: half +1, half -1, Fisher-Yates.
    for (int i = 0; i < n; ++i) entries[i] = i < n / 2 ? 1 : -1;
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
      std::swap(entries[i], entries[j]);
    }
  } else {
    for (int i = 0; i < n; ++i) entries[i] = rng.next_bernoulli(0.5) ? 1 : -1;
  }
  return LabelVector(std::move(entries));
}

Observation generate_observation(const LabelVector& labels, const ModelParams& model,
                                 std::uint64_t seed) {
  const int n = labels.n();
  if (std::holds_alternative<HeteroSbmParams>(model))
    throw ParamError("use generate_hetero_sbm for heterogeneous SBM");
  if (model_is_sbm_like(model) && !labels.balanced())
    throw BalanceError("SBM observation needs balanced labels");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  // Per-entry streams keyed by (seed, i, j): generation order is irrelevant.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      StreamRng rng(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
      const int sign = labels[i] * labels[j];
      double v = 0.0;
      if (const auto* z2 = std::get_if<Z2Params>(&model)) {
        v = sign + std::sqrt(z2->sigma2) * rng.next_gaussian();
      } else if (const auto* cbm = std::get_if<CbmParams>(&model)) {
        if (rng.next_bernoulli(cbm->alpha))
          v = rng.next_bernoulli(cbm->eps) ? -sign : sign;
      } else {
        const auto& sbm = std::get<SbmParams>(model);
        v = rng.next_bernoulli(sign == 1 ? sbm.p : sbm.q) ? 1.0 : 0.0;
      }
      a(i, j) = a(j, i) = v;
    }
  }
  return Observation(model_kind(model), std::move(a));
}

Observation apply_monotone_adversary(const Observation& obs, const LabelVector& labels,
                                     const AdversaryPlan& plan) {
  if (obs.kind() != ObsKind::SbmBinary)
    throw KindError("monotone adversary applies to SBM observations only");
  Eigen::MatrixXd a = obs.values();
  for (const auto& [i, j] : plan.pairs()) {
    const double v = labels[i] * labels[j] == 1 ? 1.0 : 0.0;
    a(i, j) = a(j, i) = v;
  }
  return Observation(ObsKind::SbmBinary, std::move(a));
}

Observation apply_additive_adversary(const Observation& obs, const LabelVector& labels,
                                     const AdversaryPlan& plan,
                                     const std::vector<double>& magnitudes) {
  if (obs.kind() == ObsKind::SbmBinary)
    throw KindError("additive adversary applies to Z2/CBM observations only");
  if (magnitudes.size() != plan.size())
    throw ParamError("one magnitude per adversary pair required");
  for (double c : magnitudes) {
    if (!(c > 0.0)) throw MagnitudeError("adversary magnitudes must be positive");
  }
  Eigen::MatrixXd a = obs.values();
  std::size_t k = 0;
  for (const auto& [i, j] : plan.pairs()) {
    a(i, j) += magnitudes[k] * labels[i] * labels[j];
    a(j, i) = a(i, j);
    ++k;
  }
  // CBM entries leave {-1,0,1} under the additive rule, so promote.
  return Observation(ObsKind::Z2Real, std::move(a));
}

Observation generate_hetero_sbm(const LabelVector& labels, const HeteroSbmParams& bounds,
                                const Eigen::MatrixXd& p_pair, const Eigen::MatrixXd& q_pair,
                                std::uint64_t seed) {
  const int n = labels.n();
  if (!labels.balanced()) throw BalanceError("hetero SBM needs balanced labels");
  if (p_pair.rows() != n || p_pair.cols() != n || q_pair.rows() != n || q_pair.cols() != n)
    throw ParamError("per-pair probability matrices must be n x n");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (p_pair(i, j) < bounds.p_lower || p_pair(i, j) > 1.0)
        throw ParamError("p_ij out of [p_lower, 1]");
      if (q_pair(i, j) > bounds.q_upper || q_pair(i, j) < 0.0)
        throw ParamError("q_ij out of [0, q_upper]");
      StreamRng rng(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
      const double prob = labels[i] * labels[j] == 1 ? p_pair(i, j) : q_pair(i, j);
      const double v = rng.next_bernoulli(prob) ? 1.0 : 0.0;
      a(i, j) = a(j, i) = v;
    }
  }
  return Observation(ObsKind::SbmBinary, std::move(a));
}

AdversaryPlan plan_random_neighborhoods(const Observation& obs, const LabelVector& labels,
                                        double rho, std::uint64_t seed) {
  const int n = obs.n();
  const int k = static_cast<int>(std::ceil(rho * n));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  StreamRng rng(seed, 0xadae5a1u);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }
  std::set<std::pair<int, int>> pairs;
  for (int t = 0; t < std::min(k, n); ++t) {
    const int u = order[t];
    for (int v = 0; v < n; ++v) {
      if (v == u) continue;
      pairs.insert({std::min(u, v), std::max(u, v)});
    }
  }
  (void)labels;
  return AdversaryPlan({pairs.begin(), pairs.end()}, n);
}

AdversaryPlan plan_low_degree_densify(const Observation& obs, const LabelVector& labels,
                                      double rho) {
  const int n = obs.n();
  const int k = static_cast<int>(std::ceil(rho * n));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXd degrees = obs.values().rowwise().sum();
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return degrees[a] < degrees[b]; });
  std::set<std::pair<int, int>> pairs;
  for (int t = 0; t < std::min(k, n); ++t) {
    const int u = order[t];
    for (int v = 0; v < n; ++v) {
      if (v == u || labels[u] * labels[v] != 1) continue;
      pairs.insert({std::min(u, v), std::max(u, v)});
    }
  }
  return AdversaryPlan({pairs.begin(), pairs.end()}, n);
}

void write_observation_text(const Observation& obs, std::ostream& out) {
  out << obs.n() << ' ' << kind_name(obs.kind()) << '\n';
  char buf[64];
  for (int i = 0; i < obs.n(); ++i) {
    for (int j = i + 1; j < obs.n(); ++j) {
      const double v = obs.values()(i, j);
      if (v == 0.0) continue;
      std::snprintf(buf, sizeof(buf), "%d %d %.17g", i, j, v);
      out << buf << '\n';
    }
  }
}

Observation read_observation_text(std::istream& in) {
  int n = 0;
  std::string kind;
  if (!(in >> n >> kind)) throw IoError("bad observation header");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  int i, j;
  double v;
  while (in >> i >> j >> v) {
    if (i < 0 || j <= i || j >= n) throw IoError("bad observation entry indices");
    a(i, j) = a(j, i) = v;
  }
  return Observation(kind_from_name(kind), std::move(a));
}

namespace {
constexpr char kBinaryMagic[8] = {'S', 'D', 'P', 'C', 'O', 'B', 'S', '1'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw IoError("truncated observation file");
  return v;
}
}  // namespace

void write_observation_binary(const Observation& obs, std::ostream& out) {
  out.write(kBinaryMagic, sizeof(kBinaryMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(obs.n()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(obs.kind()));
  std::uint64_t count = 0;
  for (int i = 0; i < obs.n(); ++i)
    for (int j = i + 1; j < obs.n(); ++j)
      if (obs.values()(i, j) != 0.0) ++count;
  put<std::uint64_t>(out, count);
  for (int i = 0; i < obs.n(); ++i) {
    for (int j = i + 1; j < obs.n(); ++j) {
      const double v = obs.values()(i, j);
      if (v == 0.0) continue;
      put<std::uint32_t>(out, static_cast<std::uint32_t>(i));
      put<std::uint32_t>(out, static_cast<std::uint32_t>(j));
      put<double>(out, v);
    }
  }
}

Observation read_observation_binary(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kBinaryMagic, sizeof(magic)) != 0)
    throw IoError("not an observation binary file");
  const auto n = get<std::uint32_t>(in);
  const auto kind = static_cast<ObsKind>(get<std::uint32_t>(in));
  const auto count = get<std::uint64_t>(in);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (std::uint64_t t = 0; t < count; ++t) {
    const auto i = get<std::uint32_t>(in);
    const auto j = get<std::uint32_t>(in);
    const auto v = get<double>(in);
    if (i >= n || j >= n || j <= i) throw IoError("bad entry indices");
    a(i, j) = a(j, i) = v;
  }
  return Observation(kind, std::move(a));
}

void save_observation(const Observation& obs, const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open for writing: " + path);
  if (binary)
    write_observation_binary(obs, out);
  else
    write_observation_text(obs, out);
  if (!out) throw IoError("write failed: " + path);
}

Observation load_observation(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  in.seekg(0);
  if (in.gcount() == 8 && std::memcmp(magic, kBinaryMagic, sizeof(magic)) == 0)
    return read_observation_binary(in);
  return read_observation_text(in);
}

}  // namespace sdpclust
