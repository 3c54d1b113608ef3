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

#include "sdpclust/snr.hpp"

#include <cmath>
#include <variant>

namespace sdpclust {

namespace {

// Long double throughout; 1e-12 tolerances are meaningless in plain
// double for some parameter corners.
long double i_star_ld(const ModelParams& model) {
  if (const auto* z2 = std::get_if<Z2Params>(&model)) {
    return 0.5L / static_cast<long double>(z2->sigma2);
  }
  if (const auto* cbm = std::get_if<CbmParams>(&model)) {
    const long double a = cbm->alpha, e = cbm->eps;
    const long double d = std::sqrt(a * (1.0L - e)) - std::sqrt(a * e);
    return d * d;
  }
  const auto& sbm = std::get<SbmParams>(model);
  const long double p = sbm.p, q = sbm.q;
  return -2.0L * std::log(std::sqrt(p * q) + std::sqrt((1.0L - p) * (1.0L - q)));
}

long double t_star_ld(const ModelParams& model) {
  if (const auto* z2 = std::get_if<Z2Params>(&model)) {
    return 1.0L / static_cast<long double>(z2->sigma2);
  }
  if (const auto* cbm = std::get_if<CbmParams>(&model)) {
    const long double e = cbm->eps;
    return 0.5L * std::log((1.0L - e) / e);
  }
  const auto& sbm = std::get<SbmParams>(model);
  const long double p = sbm.p, q = sbm.q;
  return 0.5L * std::log(p * (1.0L - q) / (q * (1.0L - p)));
}

long double lambda_star_ld(const ModelParams& model) {
  if (!std::holds_alternative<SbmParams>(model)) return 0.0L;
  const auto& sbm = std::get<SbmParams>(model);
  const long double p = sbm.p, q = sbm.q;
  return 0.5L / t_star_ld(model) * std::log((1.0L - q) / (1.0L - p));
}

}  // namespace

SnrSummary snr_summary(const ModelParams& model, int n) {
  if (std::holds_alternative<HeteroSbmParams>(model))
    throw ParamError("SNR summary is defined for Z2/CBM/SBM parameters");
  SnrSummary s;
  s.i_star = static_cast<double>(i_star_ld(model));
  s.t_star = static_cast<double>(t_star_ld(model));
  s.lambda_star = static_cast<double>(lambda_star_ld(model));
  s.n_bar = model_is_sbm_like(model) ? n / 2.0 : n;
  return s;
}

Eigen::MatrixXd shifted_adjacency(const Observation& obs, const SnrSummary& summary) {
  if (summary.lambda_star == 0.0) return obs.values();
  return obs.values().array() - summary.lambda_star;
}

double entry_mgf(const ModelParams& model, double t) {
  if (const auto* z2 = std::get_if<Z2Params>(&model)) {
    // H ~ N(1, sigma2): E exp(-tH) = exp(-t + sigma2 t^2 / 2).
    return std::exp(-t + 0.5 * z2->sigma2 * t * t);
  }
  if (const auto* cbm = std::get_if<CbmParams>(&model)) {
    // H = +1 w.p. alpha(1-eps), -1 w.p. alpha*eps, 0 otherwise.
    return (1.0 - cbm->alpha) + cbm->p() * std::exp(-t) + cbm->q() * std::exp(t);
  }
  // H = Y - Z, Y ~ Bern(p), Z ~ Bern(q) independent.
  const auto& sbm = std::get<SbmParams>(model);
  const double ey = sbm.p * std::exp(-t) + 1.0 - sbm.p;
  const double ez = sbm.q * std::exp(t) + 1.0 - sbm.q;
  return ey * ez;
}

double sample_entry_variable(const ModelParams& model, StreamRng& rng) {
  if (const auto* z2 = std::get_if<Z2Params>(&model)) {
    return 1.0 + std::sqrt(z2->sigma2) * rng.next_gaussian();
  }
  if (const auto* cbm = std::get_if<CbmParams>(&model)) {
    if (!rng.next_bernoulli(cbm->alpha)) return 0.0;
    return rng.next_bernoulli(cbm->eps) ? -1.0 : 1.0;
  }
  const auto& sbm = std::get<SbmParams>(model);
  const double y = rng.next_bernoulli(sbm.p) ? 1.0 : 0.0;
  const double z = rng.next_bernoulli(sbm.q) ? 1.0 : 0.0;
  return y - z;
}

IdentityReport check_mgf_identities(const ModelParams& model, double tol) {
  IdentityReport report;
  const long double ts = t_star_ld(model);
  const long double is = i_star_ld(model);
  auto add = [&](const std::string& name, long double lhs, long double rhs) {
    const double dev = static_cast<double>(std::fabs(lhs - rhs));
    report.checks.push_back({name, static_cast<double>(lhs), static_cast<double>(rhs), dev});
    if (dev > report.max_deviation) report.max_deviation = dev;
  };

  if (const auto* z2 = std::get_if<Z2Params>(&model)) {
    const long double s2 = z2->sigma2;
    auto mgf = [&](long double t) { return std::exp(-t + 0.5L * s2 * t * t); };
    add("z2: E exp(t*(-H)) = exp(-I*)", mgf(ts), std::exp(-is));
    add("z2: E exp(2t*(-H)) = 1", mgf(2.0L * ts), 1.0L);
  } else if (const auto* cbm = std::get_if<CbmParams>(&model)) {
    const long double a = cbm->alpha, e = cbm->eps;
    const long double p = a * (1.0L - e), q = a * e;
    auto mgf = [&](long double t) {
      return (1.0L - a) + p * std::exp(-t) + q * std::exp(t);
    };
    add("cbm: E exp(t*(-H)) = 1 - I*", mgf(ts), 1.0L - is);
    add("cbm: E exp(2t*(-H)) = 1", mgf(2.0L * ts), 1.0L);
  } else {
    const auto& sbm = std::get<SbmParams>(model);
    const long double p = sbm.p, q = sbm.q;
    const long double lam = lambda_star_ld(model);
    auto mz = [&](long double t) { return q * std::exp(t) + 1.0L - q; };
    auto my = [&](long double t) { return p * std::exp(-t) + 1.0L - p; };
    add("sbm: E exp(t*Z) E exp(-t*Y) = exp(-I*)", mz(ts) * my(ts), std::exp(-is));
    add("sbm: sqrt(E exp(t*Z) / E exp(-t*Y)) exp(-t* lambda*) = 1",
        std::sqrt(mz(ts) / my(ts)) * std::exp(-ts * lam), 1.0L);
    add("sbm: E exp(2t*Z) E exp(-2t*Y) = 1", mz(2.0L * ts) * my(2.0L * ts), 1.0L);
    add("sbm: sqrt(E exp(2t*Z) / E exp(-2t*Y)) exp(-2t* lambda*) = 1",
        std::sqrt(mz(2.0L * ts) / my(2.0L * ts)) * std::exp(-2.0L * ts * lam), 1.0L);
  }

  for (const auto& c : report.checks) {
    if (c.deviation > tol) throw IdentityViolation(c.name, c.deviation);
  }
  return report;
}

std::vector<EstimateCheck> check_snr_estimates(const ModelParams& model) {
  std::vector<EstimateCheck> checks;
  auto add = [&](const std::string& name, double slack) {
    checks.push_back({name, slack, slack >= 0.0});
  };

  if (const auto* cbm = std::get_if<CbmParams>(&model)) {
    const double p = cbm->p(), q = cbm->q();
    const double ts = static_cast<double>(t_star_ld(model));
    const double is = static_cast<double>(i_star_ld(model));
    add("cbm: t* <= (1-eps)/(2 eps) * (p-q)/p",
        (1.0 - cbm->eps) / (2.0 * cbm->eps) * (p - q) / p - ts);
    add("cbm: I* >= (p-q)^2/(4p)", is - (p - q) * (p - q) / (4.0 * p));
    add("cbm: I* <= (p-q)^2/p", (p - q) * (p - q) / p - is);
  } else if (const auto* sbm = std::get_if<SbmParams>(&model)) {
    const double lam = static_cast<double>(lambda_star_ld(model));
    add("sbm: lambda* > q", lam - sbm->q);
    add("sbm: lambda* < p", sbm->p - lam);
  } else {
    throw ParamError("SNR estimates are stated for CBM/SBM");
  }

  for (const auto& c : checks) {
    if (!c.holds)
      throw EstimateViolation(c.name + " violated, slack " + std::to_string(c.slack));
  }
  return checks;
}

}  // namespace sdpclust
