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

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "sdpclust/harness.hpp"

using namespace sdpclust;

namespace {

std::vector<TrialRecord> synthetic_records(const std::vector<double>& xs,
                                           const std::vector<double>& errs,
                                           int per_group) {
  std::vector<TrialRecord> recs;
  for (std::size_t g = 0; g < xs.size(); ++g) {
    for (int t = 0; t < per_group; ++t) {
      TrialRecord r;
      r.cell = static_cast<int>(g);
      r.trial = t;
      r.nbar_i_star = xs[g];
      r.err = errs[g];
      r.converged = true;
      recs.push_back(r);
    }
  }
  return recs;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.models = {ModelParams(Z2Params(0.5)), ModelParams(SbmParams(0.85, 0.1))};
  cfg.n_grid = {10, 12};
  cfg.trials = 2;
  cfg.solver = SolverChoice::LowRank;
  cfg.master_seed = 99;
  return cfg;
}

}  // namespace

TEST_CASE("exponent fit recovers exact log-linear slopes") {
  const std::vector<double> xs = {4.0, 6.0, 8.0, 10.0};
  for (double slope : {-1.0, -0.8}) {
    std::vector<double> errs;
    for (double x : xs) errs.push_back(std::exp(slope * x));
    const ExponentFit fit = fit_exponent(synthetic_records(xs, errs, 5));
    CHECK(fit.slope == doctest::Approx(slope).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(fit.stderr_slope <= 1e-12);
    CHECK(fit.groups_used == 4);
    CHECK(fit.zero_error_groups == 0);
  }
}

TEST_CASE("exponent fit excludes zero-error groups and guards sparsity") {
  const std::vector<double> xs = {4.0, 6.0, 8.0, 12.0};
  std::vector<double> errs = {std::exp(-4.0), std::exp(-6.0), std::exp(-8.0), 0.0};
  const ExponentFit fit = fit_exponent(synthetic_records(xs, errs, 3));
  CHECK(fit.groups_used == 3);
  CHECK(fit.zero_error_groups == 1);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));

  CHECK_THROWS_AS(fit_exponent(synthetic_records({4.0, 6.0}, {0.1, 0.01}, 3)),
                  InsufficientData);
  CHECK_THROWS_AS(
      fit_exponent(synthetic_records({4.0, 4.0, 4.0}, {0.1, 0.1, 0.1}, 3)),
      InsufficientData);
}

TEST_CASE("experiment runs deterministically and independent of workers") {
  const ExperimentConfig cfg = small_config();
  const std::vector<TrialRecord> a = run_experiment(cfg);
  const std::vector<TrialRecord> b = run_experiment(cfg);
  REQUIRE(a.size() == 8);  // 2 models x 2 sizes x 2 trials
  CHECK(a == b);

  setenv("SDPCLUST_WORKERS", "3", 1);
  const std::vector<TrialRecord> c = run_experiment(cfg);
  unsetenv("SDPCLUST_WORKERS");
  CHECK(a == c);

  // Different master seed produces different trials.
  ExperimentConfig other = cfg;
  other.master_seed = 100;
  CHECK_FALSE(run_experiment(other) == a);
}

TEST_CASE("experiment validation") {
  ExperimentConfig cfg;
  CHECK_THROWS_AS(run_experiment(cfg), ParamError);
  cfg = small_config();
  cfg.models = {ModelParams(Z2Params(0.5))};
  cfg.adversary = AdversaryStrategy::RandomNeighborhoods;
  CHECK_THROWS_AS(run_experiment(cfg), KindError);
}

TEST_CASE("adversarial cells populate the coupling flags") {
  ExperimentConfig cfg;
  cfg.models = {ModelParams(SbmParams(0.85, 0.1))};
  cfg.n_grid = {16};
  cfg.trials = 3;
  cfg.solver = SolverChoice::LowRank;
  cfg.adversary = AdversaryStrategy::RandomNeighborhoods;
  cfg.adversary_rho = 0.2;
  const std::vector<TrialRecord> recs = run_experiment(cfg);
  for (const TrialRecord& r : recs) {
    CHECK(r.adversary == "random_neighborhoods");
    CHECK(r.coupling_holds == 1);
    CHECK(r.coupling_transfers == 1);
  }
  // Without an adversary the flags stay at the n/a sentinel.
  cfg.adversary = AdversaryStrategy::None;
  for (const TrialRecord& r : run_experiment(cfg)) {
    CHECK(r.coupling_holds == -1);
    CHECK(r.coupling_transfers == -1);
  }
}

TEST_CASE("csv and jsonl round-trips are lossless") {
  const std::vector<TrialRecord> recs = run_experiment(small_config());
  std::stringstream csv;
  write_records_csv(recs, csv);
  CHECK(read_records_csv(csv) == recs);

  std::stringstream jl;
  write_records_jsonl(recs, jl);
  CHECK(read_records_jsonl(jl) == recs);
}

TEST_CASE("csv emission is byte-identical across reruns") {
  std::stringstream a, b;
  write_records_csv(run_experiment(small_config()), a);
  write_records_csv(run_experiment(small_config()), b);
  CHECK(a.str() == b.str());
  CHECK(a.str().find(kCsvSchemaVersion) != std::string::npos);
}

TEST_CASE("empty record sets serialize to a bare header") {
  std::stringstream csv;
  write_records_csv({}, csv);
  const std::string text = csv.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(read_records_csv(csv).empty());
  std::stringstream bad("not,a,valid,header\n");
  CHECK_THROWS_AS(read_records_csv(bad), IoError);
}

TEST_CASE("config json round-trip preserves every field") {
  ExperimentConfig cfg;
  cfg.models = {ModelParams(Z2Params(0.7)), ModelParams(CbmParams(0.8, 0.2)),
                ModelParams(SbmParams(0.6, 0.25))};
  cfg.n_grid = {50, 100};
  cfg.trials = 7;
  cfg.solver = SolverChoice::LowRank;
  cfg.admm.feas_tol = 1e-7;
  cfg.admm.max_iters = 1234;
  cfg.lowrank.restarts = 5;
  cfg.lowrank.seed = 17;
  cfg.adversary = AdversaryStrategy::LowDegreeDensify;
  cfg.adversary_rho = 0.3;
  cfg.diagnostics = true;
  cfg.record_timings = true;
  cfg.master_seed = 31337;
  cfg.output_path = "/tmp/x.csv";
  cfg.output_format = "jsonl";

  const ExperimentConfig rt = config_from_json_text(config_to_json_text(cfg));
  CHECK(rt.models.size() == 3);
  CHECK(format_model_params(rt.models[1]) == format_model_params(cfg.models[1]));
  CHECK(rt.n_grid == cfg.n_grid);
  CHECK(rt.trials == cfg.trials);
  CHECK(rt.solver == cfg.solver);
  CHECK(rt.admm.feas_tol == cfg.admm.feas_tol);
  CHECK(rt.admm.max_iters == cfg.admm.max_iters);
  CHECK(rt.lowrank.restarts == cfg.lowrank.restarts);
  CHECK(rt.lowrank.seed == cfg.lowrank.seed);
  CHECK(rt.adversary == cfg.adversary);
  CHECK(rt.adversary_rho == cfg.adversary_rho);
  CHECK(rt.diagnostics == cfg.diagnostics);
  CHECK(rt.record_timings == cfg.record_timings);
  CHECK(rt.master_seed == cfg.master_seed);
  CHECK(rt.output_path == cfg.output_path);
  CHECK(rt.output_format == cfg.output_format);
}

TEST_CASE("name round-trips for solvers, adversaries, and models") {
  for (auto s : {SolverChoice::Admm, SolverChoice::LowRank})
    CHECK(solver_from_name(solver_name(s)) == s);
  for (auto a : {AdversaryStrategy::None, AdversaryStrategy::RandomNeighborhoods,
                 AdversaryStrategy::LowDegreeDensify})
    CHECK(adversary_from_name(adversary_name(a)) == a);
  CHECK_THROWS_AS(solver_from_name("nope"), ParamError);
  CHECK_THROWS_AS(adversary_from_name("nope"), ParamError);

  const ModelParams m = model_from_fields("cbm", 0, 0.8, 0.2, 0, 0);
  CHECK(model_name(m) == "cbm");
  CHECK(format_model_params(m) == format_model_params(ModelParams(CbmParams(0.8, 0.2))));
}

TEST_CASE("timings stay zero unless explicitly recorded") {
  ExperimentConfig cfg = small_config();
  for (const TrialRecord& r : run_experiment(cfg)) CHECK(r.wall_time_s == 0.0);
  cfg.record_timings = true;
  double total = 0.0;
  for (const TrialRecord& r : run_experiment(cfg)) total += r.wall_time_s;
  CHECK(total > 0.0);
}

TEST_CASE("diagnostics flag populates the battery columns") {
  ExperimentConfig cfg = small_config();
  cfg.diagnostics = true;
  for (const TrialRecord& r : run_experiment(cfg)) {
    CHECK(r.diag_run);
    if (r.converged) CHECK(r.diag_pass);
  }
  cfg.diagnostics = false;
  for (const TrialRecord& r : run_experiment(cfg)) CHECK_FALSE(r.diag_run);
}
