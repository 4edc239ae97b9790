// Copyright 2026 The ARD Authors
//
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

#include "ard/orchestrator.hpp"

#include "ard/error.hpp"
#include "ard/parallel.hpp"
#include "ard/rng.hpp"
#include "ard/serialization.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ard
{

std::string_view to_string(SessionStatus s)
{
  switch (s) {
    case SessionStatus::kAwaitingDesign:
      return "awaiting_design";
    case SessionStatus::kComputingProposal:
      return "computing_proposal";
    case SessionStatus::kFinished:
      return "finished";
  }
  return "unknown";
}

std::string_view to_string(DesignScope s)
{
  return s == DesignScope::kJoint ? "joint" : "independent";
}

std::string_view to_string(DesignerKind d)
{
  return d == DesignerKind::kSimulated ? "simulated" : "human";
}

void EvaluationConfig::validate() const
{
  if (n_eval_envs < 1) throw ConfigError("evaluation: n_eval_envs must be >= 1");
  if (ratio_envs < 1) throw ConfigError("evaluation: ratio_envs must be >= 1");
  if (n_probe_envs < 1) throw ConfigError("evaluation: n_probe_envs must be >= 1");
}

WeightVector default_true_weights()
{
  Eigen::VectorXd w(kNumBaseFeatures);
  w << 0.4, 0.2, 0.6, 0.5, 0.4, 0.6;
  return WeightVector(w).normalized();
}

SessionConfig SessionConfig::resolved() const
{
  SessionConfig out = *this;
  out.devel.physics = physics;
  out.deploy.physics = physics;
  for (auto & e : out.initial_envs) e.physics = physics;
  if (out.designer == DesignerKind::kSimulated && !out.w_star) out.w_star = default_true_weights();
  return out;
}

void SessionConfig::validate() const
{
  if (iterations < 1) throw ConfigError("session: iterations must be >= 1");
  if (initial_envs.empty() && n_initial_envs < 1) throw ConfigError("session: need at least one initial environment");
  const std::size_t n0 = initial_envs.empty() ? static_cast<std::size_t>(n_initial_envs) : initial_envs.size();
  if (mode == DesignScope::kIndependent && n0 != 1) {
    throw ConfigError("session: independent mode designs against one environment and needs exactly one initial env");
  }
  if (designer == DesignerKind::kHuman && w_star) throw ConfigError("session: human sessions do not carry w_star");
  if (w_star) {
    if (w_star->size() != static_cast<std::size_t>(kNumBaseFeatures)) {
      throw ConfigError("session: w_star must have one entry per feature");
    }
    if (!w_star->values.allFinite()) throw ConfigError("session: w_star must be finite");
  }
  if (!(prior_half_width > 0.0)) throw ConfigError("session: prior_half_width must be positive");
  physics.validate();
  devel.validate();
  deploy.validate();
  for (const auto & e : initial_envs) e.validate();
  planner.validate();
  designer_model.validate();
  belief.validate();
  acquisition.validate();
  evaluation.validate();
  if (belief.n_particles < kNumBaseFeatures + 2) {
    throw ConfigError("belief: n_particles must be at least the feature dimension + 2 for entropy");
  }
}

// --- evaluation -----------------------------------------------------------------------

RegretReference regret_reference(
  const WeightVector & w_star, std::span<const EnvironmentSpec> envs, const PlannerConfig & planner)
{
  const std::vector<WeightVector> ws(envs.size(), w_star);
  const auto best = plan_batch(ws, envs, planner);
  const auto worst = plan_batch(ws, envs, planner, FeatureSpace::base(), true);
  RegretReference ref;
  for (std::size_t i = 0; i < envs.size(); ++i) {
    ref.r_max.push_back(reward(w_star, best[i].features));
    ref.r_min.push_back(reward(w_star, worst[i].features));
  }
  return ref;
}

double relative_regret(double r_max, double r_min, double r_w)
{
  return (r_max - r_w) / (r_max - r_min);
}

double percentile(std::vector<double> values, double q)
{
  if (values.empty()) throw EvaluationError("percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

RegretStats evaluate_weights(
  const WeightVector & w_eval, const WeightVector & w_star, std::span<const EnvironmentSpec> envs,
  const PlannerConfig & planner, const RegretReference * reference)
{
  if (envs.empty()) throw EvaluationError("evaluate_posterior: no evaluation environments");
  RegretReference local;
  if (reference == nullptr) {
    local = regret_reference(w_star, envs, planner);
    reference = &local;
  }
  if (reference->r_max.size() != envs.size()) throw DimensionError("evaluate_posterior: reference size mismatch");
  const std::vector<WeightVector> ws(envs.size(), w_eval);
  const auto trajs = plan_batch(ws, envs, planner);
  RegretStats stats;
  std::vector<double> kept;
  for (std::size_t i = 0; i < envs.size(); ++i) {
    EnvRegret r;
    r.r_max = reference->r_max[i];
    r.r_min = reference->r_min[i];
    r.r_w = reward(w_star, trajs[i].features);
    r.excluded = r.r_max - r.r_min < kDegenerateRegretRange;
    if (r.excluded) {
      ++stats.n_excluded;
    } else {
      r.relative_regret = relative_regret(r.r_max, r.r_min, r.r_w);
      kept.push_back(r.relative_regret);
    }
    stats.per_env.push_back(r);
  }
  if (kept.empty()) throw EvaluationError("evaluate_posterior: every evaluation environment is degenerate");
  double sum = 0.0;
  for (const double v : kept) sum += v;
  stats.mean = sum / static_cast<double>(kept.size());
  stats.p5 = percentile(kept, 5.0);
  stats.p95 = percentile(kept, 95.0);
  return stats;
}

RegretStats evaluate_posterior(
  const ParticleBelief & belief, const WeightVector & w_star, std::span<const EnvironmentSpec> envs,
  const PlannerConfig & planner, const RegretReference * reference)
{
  return evaluate_weights(belief.posterior_mean(), w_star, envs, planner, reference);
}

double regret_ratio(std::span<const double> regrets_next, const std::vector<std::vector<double>> & regrets_deploy)
{
  if (regrets_next.empty() || regrets_next.size() != regrets_deploy.size()) {
    throw DimensionError("regret_ratio: one deployment row per particle is required");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < regrets_next.size(); ++k) {
    num += regrets_next[k];
    if (regrets_deploy[k].empty()) throw DimensionError("regret_ratio: empty deployment row");
    double row = 0.0;
    for (const double r : regrets_deploy[k]) row += r;
    den += row / static_cast<double>(regrets_deploy[k].size());
  }
  num /= static_cast<double>(regrets_next.size());
  den /= static_cast<double>(regrets_next.size());
  if (den <= 1e-9) throw EvaluationError("regret_ratio: posterior already converged");
  return num / den;
}

double next_env_regret_ratio(
  const ParticleBelief & belief, const WeightVector & w_star, const EnvironmentSpec & proposed_env,
  std::span<const EnvironmentSpec> deploy_envs, const PlannerConfig & planner, int n_particles,
  std::uint64_t seed, const RegretReference * deploy_reference)
{
  if (deploy_envs.empty()) throw EvaluationError("regret_ratio: no deployment environments");
  std::vector<WeightVector> particles;
  if (n_particles <= 0 || static_cast<std::size_t>(n_particles) >= belief.size()) {
    for (std::size_t i = 0; i < belief.size(); ++i) particles.push_back(belief.particle(i));
  } else {
    particles = draw_normalizer(belief, static_cast<std::size_t>(n_particles), seed).samples;
  }
  RegretReference local;
  if (deploy_reference == nullptr) {
    local = regret_reference(w_star, deploy_envs, planner);
    deploy_reference = &local;
  }
  const RegretReference next_ref = regret_reference(w_star, std::span(&proposed_env, 1), planner);

  const std::size_t m = deploy_envs.size();
  std::vector<WeightVector> ws;
  std::vector<EnvironmentSpec> es;
  for (const auto & p : particles) {
    ws.push_back(p);
    es.push_back(proposed_env);
    for (const auto & e : deploy_envs) {
      ws.push_back(p);
      es.push_back(e);
    }
  }
  const auto trajs = plan_batch(ws, es, planner);
  auto regret_of = [&](double r_max, double r_min, const Trajectory & t) {
    if (r_max - r_min < kDegenerateRegretRange) return 0.0;
    return relative_regret(r_max, r_min, reward(w_star, t.features));
  };
  std::vector<double> next;
  std::vector<std::vector<double>> deploy;
  for (std::size_t k = 0; k < particles.size(); ++k) {
    const std::size_t base = k * (m + 1);
    next.push_back(regret_of(next_ref.r_max[0], next_ref.r_min[0], trajs[base]));
    std::vector<double> row;
    for (std::size_t e = 0; e < m; ++e) {
      row.push_back(regret_of(deploy_reference->r_max[e], deploy_reference->r_min[e], trajs[base + 1 + e]));
    }
    deploy.push_back(std::move(row));
  }
  return regret_ratio(next, deploy);
}

ViolationReport evaluate_violations(
  const WeightVector & weights, std::span<const EnvironmentSpec> envs, const PlannerConfig & planner)
{
  const std::vector<WeightVector> ws(envs.size(), weights);
  const auto trajs = plan_batch(ws, envs, planner);
  ViolationReport total;
  for (std::size_t i = 0; i < envs.size(); ++i) total += count_violations(trajs[i], envs[i]);
  return total;
}

// --- session ----------------------------------------------------------------------------

Session::Session(SessionConfig cfg, std::string session_id)
{
  cfg = cfg.resolved();
  cfg.validate();
  record_.session_id = std::move(session_id);
  record_.config = cfg;
  if (!cfg.initial_envs.empty()) {
    record_.envs = cfg.initial_envs;
  } else {
    record_.envs = sample_environments(
      cfg.devel, static_cast<std::size_t>(cfg.n_initial_envs), derive_seed(cfg.master_seed, {stream::kInitialEnvs}));
  }
  record_.belief = make_prior_belief(
    BoxPrior::cube(kNumBaseFeatures, cfg.prior_half_width), static_cast<std::size_t>(cfg.belief.n_particles),
    derive_seed(cfg.master_seed, {stream::kPrior}));
  record_.status = SessionStatus::kAwaitingDesign;
  record_.pending_env = record_.envs.back();
}

Session::Session(SessionRecord record) : record_(std::move(record)) {}

Session Session::from_record(SessionRecord record)
{
  record.config.validate();
  if (record.envs.empty()) throw Error("session record has no environments");
  if (record.status == SessionStatus::kComputingProposal) record.status = SessionStatus::kAwaitingDesign;
  if (record.status == SessionStatus::kAwaitingDesign && !record.pending_env) record.pending_env = record.envs.back();
  return Session(std::move(record));
}

std::vector<int> Session::design_env_indices() const
{
  const int n = static_cast<int>(record_.envs.size());
  std::vector<int> idx;
  if (record_.config.mode == DesignScope::kIndependent) {
    idx.push_back(n - 1);
  } else {
    for (int i = 0; i < n; ++i) idx.push_back(i);
  }
  return idx;
}

std::vector<EnvironmentSpec> Session::design_envs() const
{
  std::vector<EnvironmentSpec> out;
  for (const int i : design_env_indices()) out.push_back(record_.envs[static_cast<std::size_t>(i)]);
  return out;
}

WeightVector Session::simulated_design() const
{
  const auto & cfg = record_.config;
  if (!cfg.w_star) throw Error("simulated_design: session has no ground-truth weights");
  const auto envs = design_envs();
  const auto seed = derive_seed(cfg.master_seed, {stream::kDesigner, static_cast<std::uint64_t>(iteration())});
  return simulate_designer(*cfg.w_star, envs, cfg.designer_model, cfg.planner, seed).weights;
}

NormalizerSet Session::iteration_normalizer(int iteration) const
{
  const auto & cfg = record_.config;
  return draw_normalizer(
    record_.belief, static_cast<std::size_t>(cfg.designer_model.n_normalizer_samples),
    derive_seed(cfg.master_seed, {stream::kNormalizer, static_cast<std::uint64_t>(iteration)}));
}

const std::vector<EnvironmentSpec> & Session::eval_envs() const
{
  if (!eval_envs_) {
    const auto & cfg = record_.config;
    eval_envs_ = sample_environments(
      cfg.deploy, static_cast<std::size_t>(cfg.evaluation.n_eval_envs), derive_seed(cfg.master_seed, {stream::kEvalEnvs}));
  }
  return *eval_envs_;
}

const std::vector<EnvironmentSpec> & Session::probe_envs() const
{
  if (!probe_envs_) {
    const auto & cfg = record_.config;
    probe_envs_ = sample_environments(
      cfg.deploy, static_cast<std::size_t>(cfg.evaluation.n_probe_envs), derive_seed(cfg.master_seed, {stream::kProbeEnvs}));
  }
  return *probe_envs_;
}

const RegretReference & Session::eval_reference() const
{
  if (!eval_reference_) eval_reference_ = regret_reference(*record_.config.w_star, eval_envs(), record_.config.planner);
  return *eval_reference_;
}

FinalEvaluation Session::evaluate() const
{
  const auto & cfg = record_.config;
  FinalEvaluation out;
  const WeightVector mean = record_.belief.posterior_mean();
  if (cfg.w_star) out.regret = evaluate_weights(mean, *cfg.w_star, eval_envs(), cfg.planner, &eval_reference());
  out.violations = evaluate_violations(mean, probe_envs(), cfg.planner);
  out.violations_mean = static_cast<double>(out.violations.total()) / static_cast<double>(probe_envs().size());
  return out;
}

void Session::submit(const WeightVector & proxy_weights)
{
  if (record_.status != SessionStatus::kAwaitingDesign) throw StateError("session is not awaiting a design");
  if (proxy_weights.size() != static_cast<std::size_t>(kNumBaseFeatures)) {
    throw DimensionError("submit: weight vector must have one entry per feature");
  }
  if (!proxy_weights.values.allFinite()) throw Error("submit: weights must be finite");

  const auto t0 = std::chrono::steady_clock::now();
  const auto & cfg = record_.config;
  const auto & space = FeatureSpace::base();
  const int i = iteration();
  const auto it = static_cast<std::uint64_t>(i);

  IterationEntry entry;
  entry.iteration = i;
  entry.proxy.weights = proxy_weights;
  entry.proxy.scope = cfg.mode;
  entry.proxy.env_indices = design_env_indices();
  const auto envs = design_envs();

  const NormalizerSet normalizer = iteration_normalizer(i);
  std::vector<Eigen::MatrixXd> norm_features;
  for (const auto & e : envs) norm_features.push_back(normalizer.features(e, cfg.planner, space));
  auto evidence = make_evidence(
    proxy_weights, envs, normalizer, cfg.designer_model.beta_inverse, cfg.planner, space, norm_features);
  record_.belief = apply_evidence(record_.belief, std::move(evidence), cfg.belief);

  const auto & belief = record_.belief;
  entry.particles = belief.particles;
  entry.log_weights = belief.log_weights;
  entry.entropy = entropy(belief);
  entry.posterior_mean = belief.posterior_mean();
  entry.map_estimate = belief.map_estimate();
  if (cfg.w_star) {
    entry.regret = evaluate_weights(entry.posterior_mean, *cfg.w_star, eval_envs(), cfg.planner, &eval_reference());
  }
  entry.proxy_violations = evaluate_violations(proxy_weights, probe_envs(), cfg.planner);
  entry.posterior_violations = evaluate_violations(entry.posterior_mean, probe_envs(), cfg.planner);

  const auto candidates = sample_environments(
    cfg.devel, static_cast<std::size_t>(cfg.acquisition.n_candidates), derive_seed(cfg.master_seed, {stream::kCandidates, it}));
  AcquisitionContext ctx;
  ctx.belief = &belief;
  ctx.history = record_.envs;
  ctx.scope = cfg.mode;
  ctx.normalizer = &normalizer;
  if (cfg.mode == DesignScope::kJoint) ctx.history_normalizer_features = norm_features;
  ctx.model = cfg.designer_model;
  ctx.planner = cfg.planner;
  entry.acquisition = propose_next(
    candidates, ctx, cfg.method, cfg.acquisition, derive_seed(cfg.master_seed, {stream::kAcquisition, it}));

  if (cfg.w_star && cfg.evaluation.regret_ratio) {
    const auto & all = eval_envs();
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(cfg.evaluation.ratio_envs), all.size());
    const auto & ref_all = eval_reference();
    RegretReference ref{
      std::vector<double>(ref_all.r_max.begin(), ref_all.r_max.begin() + static_cast<std::ptrdiff_t>(m)),
      std::vector<double>(ref_all.r_min.begin(), ref_all.r_min.begin() + static_cast<std::ptrdiff_t>(m))};
    try {
      entry.regret_ratio = next_env_regret_ratio(
        belief, *cfg.w_star, entry.acquisition.env, std::span(all.data(), m), cfg.planner,
        cfg.evaluation.ratio_particles, derive_seed(cfg.master_seed, {stream::kRatio, it}), &ref);
    } catch (const EvaluationError &) {
      entry.regret_ratio.reset();
    }
  }

  record_.envs.push_back(entry.acquisition.env);
  if (cfg.evaluation.record_timing) {
    entry.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  FinalEvaluation fin;
  fin.regret = entry.regret;
  fin.violations = entry.posterior_violations;
  fin.violations_mean = static_cast<double>(fin.violations.total()) / static_cast<double>(probe_envs().size());
  record_.entries.push_back(std::move(entry));

  if (iteration() >= cfg.iterations) {
    record_.status = SessionStatus::kFinished;
    record_.pending_env.reset();
    record_.final_evaluation = std::move(fin);
  } else {
    record_.status = SessionStatus::kAwaitingDesign;
    record_.pending_env = record_.envs.back();
  }
}

void Session::run()
{
  while (record_.status == SessionStatus::kAwaitingDesign) submit(simulated_design());
}

AcquisitionResult Session::propose(AcquisitionMethod method, std::uint64_t seed) const
{
  const auto & cfg = record_.config;
  const NormalizerSet normalizer = iteration_normalizer(iteration());
  const auto candidates = sample_environments(
    cfg.devel, static_cast<std::size_t>(cfg.acquisition.n_candidates), derive_seed(seed, {stream::kCandidates}));
  AcquisitionContext ctx;
  ctx.belief = &record_.belief;
  ctx.history = record_.envs;
  ctx.scope = cfg.mode;
  ctx.normalizer = &normalizer;
  ctx.model = cfg.designer_model;
  ctx.planner = cfg.planner;
  return propose_next(candidates, ctx, method, cfg.acquisition, derive_seed(seed, {stream::kAcquisition}));
}

SessionRecord run_session(const SessionConfig & cfg, const std::string & session_id)
{
  if (cfg.designer == DesignerKind::kHuman) {
    throw ConfigError("run_session: human-designer sessions run through the service");
  }
  Session s(cfg, session_id);
  s.run();
  return s.record();
}

// --- suite ------------------------------------------------------------------------------

std::string suite_cell_id(AcquisitionMethod method, std::uint64_t seed)
{
  return std::string(to_string(method)) + "_seed" + std::to_string(seed);
}

SuiteResult run_experiment_suite(const SuiteConfig & cfg)
{
  if (cfg.methods.empty() || cfg.seeds.empty()) throw ConfigError("suite: need at least one method and one seed");
  SuiteResult result;
  for (const auto seed : cfg.seeds) {
    for (const auto m : cfg.methods) result.cells.push_back(SuiteCell{m, seed, std::nullopt, {}});
  }
  parallel_for(result.cells.size(), [&](std::size_t k) {
    auto & cell = result.cells[k];
    SessionConfig sc = cfg.base;
    sc.method = cell.method;
    sc.master_seed = cell.seed;
    try {
      cell.record = run_session(sc, suite_cell_id(cell.method, cell.seed));
    } catch (const ConfigError &) {
      throw;
    } catch (const std::exception & e) {
      cell.error = e.what();
    }
  });
  return result;
}

std::vector<SuiteRow> SuiteResult::rows() const
{
  std::vector<SuiteRow> out;
  for (const auto & cell : cells) {
    if (!cell.record) continue;
    const double n_probe = static_cast<double>(cell.record->config.evaluation.n_probe_envs);
    for (const auto & e : cell.record->entries) {
      SuiteRow r;
      r.method = cell.method;
      r.seed = cell.seed;
      r.iteration = e.iteration;
      r.mean_regret = e.regret ? e.regret->mean : std::nan("");
      r.regret_p5 = e.regret ? e.regret->p5 : std::nan("");
      r.regret_p95 = e.regret ? e.regret->p95 : std::nan("");
      r.regret_ratio = e.regret_ratio ? *e.regret_ratio : std::nan("");
      r.entropy = e.entropy;
      r.violations_mean = static_cast<double>(e.posterior_violations.total()) / n_probe;
      out.push_back(r);
    }
  }
  return out;
}

std::string suite_csv(const SuiteResult & result)
{
  std::ostringstream os;
  os << "method,seed,iteration,mean_regret,regret_p5,regret_p95,regret_ratio,entropy,violations_mean\n";
  os << std::setprecision(17);
  auto num = [&os](double v) {
    if (std::isnan(v)) {
      os << "";
    } else {
      os << v;
    }
  };
  for (const auto & r : result.rows()) {
    os << to_string(r.method) << ',' << r.seed << ',' << r.iteration << ',';
    num(r.mean_regret);
    os << ',';
    num(r.regret_p5);
    os << ',';
    num(r.regret_p95);
    os << ',';
    num(r.regret_ratio);
    os << ',';
    num(r.entropy);
    os << ',';
    num(r.violations_mean);
    os << '\n';
  }
  return os.str();
}

void write_suite_outputs(const SuiteResult & result, const std::filesystem::path & out_dir)
{
  std::filesystem::create_directories(out_dir);
  for (const auto & cell : result.cells) {
    if (cell.record) write_text_atomic(out_dir / ("session_" + cell.record->session_id + ".json"), dump_record(*cell.record));
  }
  write_text_atomic(out_dir / "suite_summary.csv", suite_csv(result));
  write_text_atomic(out_dir / "suite_summary.json", suite_to_json(result).dump(2) + "\n");
}

}  // namespace ard
