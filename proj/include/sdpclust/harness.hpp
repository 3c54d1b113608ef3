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

#ifndef SDPCLUST_HARNESS_HPP
#define SDPCLUST_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sdpclust/models.hpp"
#include "sdpclust/sdp.hpp"

namespace sdpclust {

enum class SolverChoice { Admm, LowRank };
enum class AdversaryStrategy { None, RandomNeighborhoods, LowDegreeDensify };

std::string solver_name(SolverChoice s);
SolverChoice solver_from_name(const std::string& name);
std::string adversary_name(AdversaryStrategy s);
AdversaryStrategy adversary_from_name(const std::string& name);

// Declarative description of one Monte Carlo sweep: the cell grid is the
// cross product of `models` and `n_grid`.
struct ExperimentConfig {
  std::vector<ModelParams> models;
  std::vector<int> n_grid;
  int trials = 1;
  SolverChoice solver = SolverChoice::Admm;
  AdmmConfig admm;
  LowRankConfig lowrank;
  AdversaryStrategy adversary = AdversaryStrategy::None;
  double adversary_rho = 0.2;
  bool diagnostics = false;
  // Off by default: wall-clock timings are inherently non-deterministic
  // and would break the byte-identical-output contract.
  bool record_timings = false;
  std::uint64_t master_seed = 1;
  std::string output_path;
  std::string output_format = "csv";  // "csv" or "jsonl"
};

// One Monte Carlo trial. Every field is present in every row; sentinel -1
// marks not-applicable integer flags (e.g. coupling without an adversary).
struct TrialRecord {
  int cell = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string model;
  std::string params;  // "key=value" pairs joined by ';'
  int n = 0;
  double i_star = 0.0;
  double nbar_i_star = 0.0;
  std::string solver;
  bool converged = false;
  bool fallback_used = false;
  int iterations = 0;
  bool member = false;
  double gap = 0.0;
  double err = 0.0;
  double l1_rate = 0.0;
  double l1_row_rate = 0.0;
  bool exact = false;
  std::string adversary;
  int coupling_holds = -1;      // -1 n/a, else 0/1
  int coupling_transfers = -1;  // -1 n/a, else 0/1
  bool diag_run = false;
  bool diag_pass = false;
  double wall_time_s = 0.0;

  bool operator==(const TrialRecord& o) const;
};

// Runs the full sweep deterministically: per-trial seeds derive from
// (master seed, cell index, trial index), so output is independent of the
// worker count (env var SDPCLUST_WORKERS) and of scheduling.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg);

int worker_count_from_env();

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  int groups_used = 0;
  int zero_error_groups = 0;  // excluded from the log fit
};

// OLS of log(mean err) against nbar * I*, grouping records by that value.
// Groups with zero empirical error are excluded (they support the
// exact-recovery criterion instead). Throws InsufficientData when fewer
// than 3 usable groups remain.
ExponentFit fit_exponent(const std::vector<TrialRecord>& records);

// Schema-versioned, lossless emission; fields formatted with 17
// significant digits so a rerun is byte-identical.
extern const char* const kCsvSchemaVersion;
void write_records_csv(const std::vector<TrialRecord>& records, std::ostream& out);
void write_records_jsonl(const std::vector<TrialRecord>& records, std::ostream& out);
void emit_results(const std::vector<TrialRecord>& records, const std::string& format,
                  const std::string& path);
std::vector<TrialRecord> read_records_csv(std::istream& in);
std::vector<TrialRecord> read_records_jsonl(std::istream& in);
std::vector<TrialRecord> load_records(const std::string& path);

// Config (de)serialization: a single JSON document mirroring
// ExperimentConfig; CLI flags override individual fields.
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

// Helpers shared with the CLI.
std::string format_model_params(const ModelParams& model);
ModelParams model_from_fields(const std::string& name, double sigma2, double alpha,
                              double eps, double p, double q);

}  // namespace sdpclust

#endif  // SDPCLUST_HARNESS_HPP
