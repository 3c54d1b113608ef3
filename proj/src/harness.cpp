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

#include "sdpclust/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <variant>

#include "json.hpp"
#include "sdpclust/diagnostics.hpp"
#include "sdpclust/rng.hpp"
#include "sdpclust/rounding.hpp"

namespace sdpclust {

const char* const kCsvSchemaVersion = "sdpclust-trials-v1";

namespace {

const char* const kCsvHeader =
    "schema,cell,trial,seed,model,params,n,i_star,nbar_i_star,solver,converged,"
    "fallback_used,iterations,member,gap,err,l1_rate,l1_row_rate,exact,adversary,"
    "coupling_holds,coupling_transfers,diag_run,diag_pass,wall_time_s";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string solver_name(SolverChoice s) {
  return s == SolverChoice::Admm ? "admm" : "lowrank";
}

SolverChoice solver_from_name(const std::string& name) {
  if (name == "admm") return SolverChoice::Admm;
  if (name == "lowrank") return SolverChoice::LowRank;
  throw ParamError("unknown solver: " + name);
}

std::string adversary_name(AdversaryStrategy s) {
  switch (s) {
    case AdversaryStrategy::None: return "none";
    case AdversaryStrategy::RandomNeighborhoods: return "random_neighborhoods";
    case AdversaryStrategy::LowDegreeDensify: return "low_degree_densify";
  }
  return "?";
}

AdversaryStrategy adversary_from_name(const std::string& name) {
  if (name == "none" || name.empty()) return AdversaryStrategy::None;
  if (name == "random_neighborhoods") return AdversaryStrategy::RandomNeighborhoods;
  if (name == "low_degree_densify") return AdversaryStrategy::LowDegreeDensify;
  throw ParamError("unknown adversary strategy: " + name);
}

std::string format_model_params(const ModelParams& model) {
  if (const auto* z2 = std::get_if<Z2Params>(&model)) return "sigma2=" + fmt(z2->sigma2);
  if (const auto* cbm = std::get_if<CbmParams>(&model))
    return "alpha=" + fmt(cbm->alpha) + ";eps=" + fmt(cbm->eps);
  if (const auto* sbm = std::get_if<SbmParams>(&model))
    return "p=" + fmt(sbm->p) + ";q=" + fmt(sbm->q);
  const auto& h = std::get<HeteroSbmParams>(model);
  return "p_lower=" + fmt(h.p_lower) + ";q_upper=" + fmt(h.q_upper);
}

ModelParams model_from_fields(const std::string& name, double sigma2, double alpha,
                              double eps, double p, double q) {
  if (name == "z2") return Z2Params(sigma2);
  if (name == "cbm") return CbmParams(alpha, eps);
  if (name == "sbm") return SbmParams(p, q);
  throw ParamError("unknown model name: " + name);
}

bool TrialRecord::operator==(const TrialRecord& o) const {
  return cell == o.cell && trial == o.trial && seed == o.seed && model == o.model &&
         params == o.params && n == o.n && i_star == o.i_star &&
         nbar_i_star == o.nbar_i_star && solver == o.solver && converged == o.converged &&
         fallback_used == o.fallback_used && iterations == o.iterations &&
         member == o.member && gap == o.gap && err == o.err && l1_rate == o.l1_rate &&
         l1_row_rate == o.l1_row_rate && exact == o.exact && adversary == o.adversary &&
         coupling_holds == o.coupling_holds && coupling_transfers == o.coupling_transfers &&
         diag_run == o.diag_run && diag_pass == o.diag_pass &&
         wall_time_s == o.wall_time_s;
}

int worker_count_from_env() {
  const char* env = std::getenv("SDPCLUST_WORKERS");
  if (env == nullptr) return 1;
  const int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

namespace {

// Full diagnostic battery on a solved trial; any violation fails the trial's
// diag_pass flag (the checks throw on violation).
bool run_diagnostics(const SdpSolution& sol, const Observation& obs,
                     const LabelVector& truth, const ModelParams& model,
                     const SnrSummary& summary) {
  try {
    const DualCertificate cert = dual_certificate(obs, truth, summary);
    const double cert_tol =
        1e-10 * shifted_adjacency(obs, summary).cwiseAbs().maxCoeff() * obs.n();
    if (certificate_identity_deviation(cert, obs, truth, summary) > cert_tol) return false;
    check_ptperp_facts(sol, truth);
    if (!check_basic_inequality(sol, obs, truth, model, summary).holds) return false;
    // <EA - lambda* J, P_Tperp(Y)> vanishes up to the balance feasibility slack.
    const double ms = mean_shift_orthogonality(sol, truth, model, summary);
    if (std::fabs(ms) > 1e-6 * obs.n() * obs.n() + 1e-8) return false;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

TrialRecord run_trial(const ExperimentConfig& cfg, const ModelParams& model, int cell,
                      int n, int trial) {
  TrialRecord rec;
  rec.cell = cell;
  rec.trial = trial;
  rec.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(cell),
                         static_cast<std::uint64_t>(trial));
  rec.model = model_name(model);
  rec.params = format_model_params(model);
  rec.n = n;
  rec.solver = solver_name(cfg.solver);
  rec.adversary = adversary_name(cfg.adversary);

  const auto t0 = std::chrono::steady_clock::now();
  try {
    const SnrSummary summary = snr_summary(model, n);
    rec.i_star = summary.i_star;
    rec.nbar_i_star = summary.n_bar * summary.i_star;

    const LabelVector truth = generate_labels(n, model, derive_seed(rec.seed, 1));
    const Observation obs = generate_observation(truth, model, derive_seed(rec.seed, 2));

    Observation used = obs;
    if (cfg.adversary != AdversaryStrategy::None) {
      const AdversaryPlan plan =
          cfg.adversary == AdversaryStrategy::RandomNeighborhoods
              ? plan_random_neighborhoods(obs, truth, cfg.adversary_rho,
                                          derive_seed(rec.seed, 3))
              : plan_low_degree_densify(obs, truth, cfg.adversary_rho);
      used = apply_monotone_adversary(obs, truth, plan);
    }

    const SdpVariant variant = default_variant(used.kind());
    SdpSolution sol;
    if (cfg.solver == SolverChoice::LowRank) {
      LowRankConfig lr = cfg.lowrank;
      lr.seed = derive_seed(rec.seed, 4);
      sol = solve_low_rank(used, variant, lr);
    } else {
      sol = solve_admm(used, variant, cfg.admm);
    }
    CertResult cert = certify_sublevel(sol, used, truth, variant, cfg.admm.feas_tol);
    if (!cert.member && cfg.solver == SolverChoice::LowRank) {
      // The error bounds only require membership in the sublevel set; when
      // the low-rank solver misses it, fall back to the accuracy reference.
      sol = solve_admm(used, variant, cfg.admm);
      cert = certify_sublevel(sol, used, truth, variant, cfg.admm.feas_tol);
      rec.fallback_used = true;
    }
    rec.converged = sol.stats.converged;
    rec.iterations = sol.stats.iterations;
    rec.member = cert.member;
    rec.gap = cert.gap;

    if (cfg.adversary != AdversaryStrategy::None) {
      const CouplingResult coupling = coupling_check(sol, obs, used, truth);
      rec.coupling_holds = coupling.inequality_holds ? 1 : 0;
      rec.coupling_transfers = coupling.membership_transfers ? 1 : 0;
    }

    const RoundResult rounded = round_solution(sol);
    const ErrorReport score = score_solution(sol, rounded.labels, truth);
    rec.err = score.err;
    rec.l1_rate = score.l1_rate;
    rec.l1_row_rate = score.l1_row_rate;
    rec.exact = score.exact;

    if (cfg.diagnostics) {
      rec.diag_run = true;
      rec.diag_pass = run_diagnostics(sol, used, truth, model, summary);
    }
  } catch (const std::exception&) {
    // A failed trial is recorded, never aborts the sweep.
    rec.converged = false;
  }
  if (cfg.record_timings) {
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return rec;
}

}  // namespace

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.models.empty() || cfg.n_grid.empty() || cfg.trials < 1)
    throw ParamError("experiment needs at least one model, one n, and one trial");
  if (cfg.adversary != AdversaryStrategy::None) {
    for (const ModelParams& m : cfg.models) {
      if (model_kind(m) != ObsKind::SbmBinary)
        throw KindError("the monotone adversary applies to SBM cells only");
    }
  }

  struct Task {
    const ModelParams* model;
    int cell;
    int n;
    int trial;
  };
  std::vector<Task> tasks;
  int cell = 0;
  for (const ModelParams& model : cfg.models) {
    for (int n : cfg.n_grid) {
      for (int t = 0; t < cfg.trials; ++t) tasks.push_back({&model, cell, n, t});
      ++cell;
    }
  }

  std::vector<TrialRecord> records(tasks.size());
  const int workers = std::min<int>(worker_count_from_env(), static_cast<int>(tasks.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const Task& t = tasks[i];
      records[i] = run_trial(cfg, *t.model, t.cell, t.n, t.trial);
    }
  } else {
    // Position-indexed results: output is independent of scheduling.
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          const Task& t = tasks[i];
          records[i] = run_trial(cfg, *t.model, t.cell, t.n, t.trial);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }
  return records;
}

ExponentFit fit_exponent(const std::vector<TrialRecord>& records) {
  std::map<double, std::pair<double, int>> groups;  // nbar_i_star -> (sum err, count)
  for (const TrialRecord& r : records) {
    auto& g = groups[r.nbar_i_star];
    g.first += r.err;
    g.second += 1;
  }
  std::vector<double> xs, ys;
  ExponentFit fit;
  for (const auto& [x, g] : groups) {
    const double mean = g.first / g.second;
    if (mean <= 0.0) {
      ++fit.zero_error_groups;
      continue;
    }
    xs.push_back(x);
    ys.push_back(std::log(mean));
  }
  const int k = static_cast<int>(xs.size());
  if (k < 3) throw InsufficientData("need >= 3 groups with nonzero mean error");
  fit.groups_used = k;

  double sx = 0.0, sy = 0.0;
  for (int i = 0; i < k; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < k; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw InsufficientData("all groups share one SNR value");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (int i = 0; i < k; ++i) {
    const double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
    rss += resid * resid;
  }
  fit.stderr_slope = k > 2 ? std::sqrt(rss / (k - 2) / sxx) : 0.0;
  return fit;
}

namespace {

std::string record_to_csv(const TrialRecord& r) {
  std::ostringstream out;
  out << kCsvSchemaVersion << ',' << r.cell << ',' << r.trial << ',' << r.seed << ','
      << r.model << ',' << r.params << ',' << r.n << ',' << fmt(r.i_star) << ','
      << fmt(r.nbar_i_star) << ',' << r.solver << ',' << (r.converged ? 1 : 0) << ','
      << (r.fallback_used ? 1 : 0) << ',' << r.iterations << ',' << (r.member ? 1 : 0)
      << ',' << fmt(r.gap) << ',' << fmt(r.err) << ',' << fmt(r.l1_rate) << ','
      << fmt(r.l1_row_rate) << ',' << (r.exact ? 1 : 0) << ',' << r.adversary << ','
      << r.coupling_holds << ',' << r.coupling_transfers << ',' << (r.diag_run ? 1 : 0)
      << ',' << (r.diag_pass ? 1 : 0) << ',' << fmt(r.wall_time_s);
  return out.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

nlohmann::json record_to_json(const TrialRecord& r) {
  return nlohmann::json{{"schema", kCsvSchemaVersion},
                        {"cell", r.cell},
                        {"trial", r.trial},
                        {"seed", r.seed},
                        {"model", r.model},
                        {"params", r.params},
                        {"n", r.n},
                        {"i_star", r.i_star},
                        {"nbar_i_star", r.nbar_i_star},
                        {"solver", r.solver},
                        {"converged", r.converged},
                        {"fallback_used", r.fallback_used},
                        {"iterations", r.iterations},
                        {"member", r.member},
                        {"gap", r.gap},
                        {"err", r.err},
                        {"l1_rate", r.l1_rate},
                        {"l1_row_rate", r.l1_row_rate},
                        {"exact", r.exact},
                        {"adversary", r.adversary},
                        {"coupling_holds", r.coupling_holds},
                        {"coupling_transfers", r.coupling_transfers},
                        {"diag_run", r.diag_run},
                        {"diag_pass", r.diag_pass},
                        {"wall_time_s", r.wall_time_s}};
}

TrialRecord record_from_json(const nlohmann::json& j) {
  TrialRecord r;
  r.cell = j.at("cell").get<int>();
  r.trial = j.at("trial").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.model = j.at("model").get<std::string>();
  r.params = j.at("params").get<std::string>();
  r.n = j.at("n").get<int>();
  r.i_star = j.at("i_star").get<double>();
  r.nbar_i_star = j.at("nbar_i_star").get<double>();
  r.solver = j.at("solver").get<std::string>();
  r.converged = j.at("converged").get<bool>();
  r.fallback_used = j.at("fallback_used").get<bool>();
  r.iterations = j.at("iterations").get<int>();
  r.member = j.at("member").get<bool>();
  r.gap = j.at("gap").get<double>();
  r.err = j.at("err").get<double>();
  r.l1_rate = j.at("l1_rate").get<double>();
  r.l1_row_rate = j.at("l1_row_rate").get<double>();
  r.exact = j.at("exact").get<bool>();
  r.adversary = j.at("adversary").get<std::string>();
  r.coupling_holds = j.at("coupling_holds").get<int>();
  r.coupling_transfers = j.at("coupling_transfers").get<int>();
  r.diag_run = j.at("diag_run").get<bool>();
  r.diag_pass = j.at("diag_pass").get<bool>();
  r.wall_time_s = j.at("wall_time_s").get<double>();
  return r;
}

}  // namespace

void write_records_csv(const std::vector<TrialRecord>& records, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const TrialRecord& r : records) out << record_to_csv(r) << '\n';
}

void write_records_jsonl(const std::vector<TrialRecord>& records, std::ostream& out) {
  for (const TrialRecord& r : records) out << record_to_json(r).dump() << '\n';
}

void emit_results(const std::vector<TrialRecord>& records, const std::string& format,
                  const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  if (format == "csv")
    write_records_csv(records, out);
  else if (format == "jsonl")
    write_records_jsonl(records, out);
  else
    throw ParamError("unknown output format: " + format);
  if (!out) throw IoError("write failed: " + path);
}

std::vector<TrialRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("missing CSV header");
  if (line != kCsvHeader) throw IoError("unexpected CSV header/schema version");
  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != 25) throw IoError("bad CSV row: " + line);
    if (f[0] != kCsvSchemaVersion) throw IoError("schema mismatch in row: " + line);
    TrialRecord r;
    r.cell = std::stoi(f[1]);
    r.trial = std::stoi(f[2]);
    r.seed = std::stoull(f[3]);
    r.model = f[4];
    r.params = f[5];
    r.n = std::stoi(f[6]);
    r.i_star = std::stod(f[7]);
    r.nbar_i_star = std::stod(f[8]);
    r.solver = f[9];
    r.converged = f[10] == "1";
    r.fallback_used = f[11] == "1";
    r.iterations = std::stoi(f[12]);
    r.member = f[13] == "1";
    r.gap = std::stod(f[14]);
    r.err = std::stod(f[15]);
    r.l1_rate = std::stod(f[16]);
    r.l1_row_rate = std::stod(f[17]);
    r.exact = f[18] == "1";
    r.adversary = f[19];
    r.coupling_holds = std::stoi(f[20]);
    r.coupling_transfers = std::stoi(f[21]);
    r.diag_run = f[22] == "1";
    r.diag_pass = f[23] == "1";
    r.wall_time_s = std::stod(f[24]);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<TrialRecord> read_records_jsonl(std::istream& in) {
  std::vector<TrialRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(record_from_json(nlohmann::json::parse(line)));
  }
  return records;
}

std::vector<TrialRecord> load_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  const int first = in.peek();
  if (first == '{') return read_records_jsonl(in);
  return read_records_csv(in);
}

namespace {

ModelParams model_from_json(const nlohmann::json& j) {
  const std::string name = j.at("model").get<std::string>();
  return model_from_fields(name, j.value("sigma2", 0.0), j.value("alpha", 0.0),
                           j.value("eps", 0.0), j.value("p", 0.0), j.value("q", 0.0));
}

nlohmann::json model_to_json(const ModelParams& model) {
  nlohmann::json j{{"model", model_name(model)}};
  if (const auto* z2 = std::get_if<Z2Params>(&model)) {
    j["sigma2"] = z2->sigma2;
  } else if (const auto* cbm = std::get_if<CbmParams>(&model)) {
    j["alpha"] = cbm->alpha;
    j["eps"] = cbm->eps;
  } else if (const auto* sbm = std::get_if<SbmParams>(&model)) {
    j["p"] = sbm->p;
    j["q"] = sbm->q;
  }
  return j;
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig cfg;
  for (const auto& m : j.at("models")) cfg.models.push_back(model_from_json(m));
  cfg.n_grid = j.at("n_grid").get<std::vector<int>>();
  cfg.trials = j.value("trials", 1);
  cfg.solver = solver_from_name(j.value("solver", "admm"));
  if (j.contains("admm")) {
    const auto& a = j["admm"];
    cfg.admm.feas_tol = a.value("feas_tol", cfg.admm.feas_tol);
    cfg.admm.max_iters = a.value("max_iters", cfg.admm.max_iters);
    cfg.admm.penalty = a.value("penalty", cfg.admm.penalty);
    cfg.admm.adaptive_penalty = a.value("adaptive_penalty", cfg.admm.adaptive_penalty);
  }
  if (j.contains("lowrank")) {
    const auto& l = j["lowrank"];
    cfg.lowrank.rank = l.value("rank", cfg.lowrank.rank);
    cfg.lowrank.max_iters = l.value("max_iters", cfg.lowrank.max_iters);
    cfg.lowrank.restarts = l.value("restarts", cfg.lowrank.restarts);
    cfg.lowrank.grad_tol = l.value("grad_tol", cfg.lowrank.grad_tol);
    cfg.lowrank.feas_tol = l.value("feas_tol", cfg.lowrank.feas_tol);
    // Baseline only: the sweep re-derives a per-trial solver seed.
    cfg.lowrank.seed = l.value("seed", cfg.lowrank.seed);
    cfg.lowrank.balance_rounds = l.value("balance_rounds", cfg.lowrank.balance_rounds);
  }
  cfg.adversary = adversary_from_name(j.value("adversary", "none"));
  cfg.adversary_rho = j.value("adversary_rho", cfg.adversary_rho);
  cfg.diagnostics = j.value("diagnostics", false);
  cfg.record_timings = j.value("record_timings", false);
  cfg.master_seed = j.value("master_seed", std::uint64_t{1});
  cfg.output_path = j.value("output_path", std::string{});
  cfg.output_format = j.value("output_format", std::string{"csv"});
  return cfg;
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  nlohmann::json j;
  for (const ModelParams& m : cfg.models) j["models"].push_back(model_to_json(m));
  j["n_grid"] = cfg.n_grid;
  j["trials"] = cfg.trials;
  j["solver"] = solver_name(cfg.solver);
  j["admm"] = {{"feas_tol", cfg.admm.feas_tol},
               {"max_iters", cfg.admm.max_iters},
               {"penalty", cfg.admm.penalty},
               {"adaptive_penalty", cfg.admm.adaptive_penalty}};
  j["lowrank"] = {{"rank", cfg.lowrank.rank},
                  {"max_iters", cfg.lowrank.max_iters},
                  {"restarts", cfg.lowrank.restarts},
                  {"grad_tol", cfg.lowrank.grad_tol},
                  {"feas_tol", cfg.lowrank.feas_tol},
                  {"seed", cfg.lowrank.seed},
                  {"balance_rounds", cfg.lowrank.balance_rounds}};
  j["adversary"] = adversary_name(cfg.adversary);
  j["adversary_rho"] = cfg.adversary_rho;
  j["diagnostics"] = cfg.diagnostics;
  j["record_timings"] = cfg.record_timings;
  j["master_seed"] = cfg.master_seed;
  j["output_path"] = cfg.output_path;
  j["output_format"] = cfg.output_format;
  return j.dump(2);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_json_text(text.str());
}

}  // namespace sdpclust
