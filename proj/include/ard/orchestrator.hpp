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

#ifndef ARD__ORCHESTRATOR_HPP_
#define ARD__ORCHESTRATOR_HPP_

#include "ard/acquisition.hpp"
#include "ard/belief.hpp"
#include "ard/driving_env.hpp"
#include "ard/environment_space.hpp"
#include "ard/planner.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ard
{

enum class SessionStatus { kAwaitingDesign, kComputingProposal, kFinished };
enum class DesignerKind { kSimulated, kHuman };

std::string_view to_string(SessionStatus s);
std::string_view to_string(DesignScope s);
std::string_view to_string(DesignerKind d);

struct EvaluationConfig
{
  int n_eval_envs{100};    ///< deployment environments for relative regret
  int ratio_particles{20};  ///< belief particles averaged in the regret ratio
  int ratio_envs{50};      ///< leading eval envs used in the regret-ratio denominator
  int n_probe_envs{20};    ///< fixed deployment set for violation counts
  bool regret_ratio{true};
  bool record_timing{false};  ///< wall-clock per iteration; breaks byte-determinism

  void validate() const;
  bool operator==(const EvaluationConfig &) const = default;
};

/// Unit-normalized default ground truth for simulated sessions.
WeightVector default_true_weights();

struct SessionConfig
{
  DesignScope mode{DesignScope::kJoint};
  AcquisitionMethod method{AcquisitionMethod::kMaxInfo};
  int iterations{6};
  int n_initial_envs{1};
  std::vector<EnvironmentSpec> initial_envs;  ///< overrides n_initial_envs when non-empty
  DesignerKind designer{DesignerKind::kSimulated};
  std::optional<WeightVector> w_star;  ///< simulated sessions only
  PhysicsConfig physics{};
  EnvironmentDistribution devel{EnvironmentDistribution::devel()};
  EnvironmentDistribution deploy{EnvironmentDistribution::deploy()};
  PlannerConfig planner{};
  DesignerModelConfig designer_model{};
  BeliefConfig belief{};
  AcquisitionConfig acquisition{};
  EvaluationConfig evaluation{};
  double prior_half_width{1.0};
  std::uint64_t master_seed{0};

  /// Copies `physics` into both distributions and the explicit initial envs.
  SessionConfig resolved() const;
  void validate() const;
};

struct EnvRegret
{
  double r_max{0.0};
  double r_min{0.0};
  double r_w{0.0};
  double relative_regret{0.0};
  bool excluded{false};  ///< r_max - r_min below the degeneracy threshold
};

struct RegretStats
{
  std::vector<EnvRegret> per_env;
  double mean{0.0};
  double p5{0.0};
  double p95{0.0};
  int n_excluded{0};
};

inline constexpr double kDegenerateRegretRange = 1e-6;

/// r_max and r_min of w* per environment; independent of the weights being evaluated.
struct RegretReference
{
  std::vector<double> r_max;
  std::vector<double> r_min;
};

RegretReference regret_reference(
  const WeightVector & w_star, std::span<const EnvironmentSpec> envs, const PlannerConfig & planner);

double relative_regret(double r_max, double r_min, double r_w);

/// Linear-interpolation percentile, q in [0, 100].
double percentile(std::vector<double> values, double q);

/// Regret of planning under `w_eval`, judged by `w_star`. Throws EvaluationError when every
/// environment is degenerate.
RegretStats evaluate_weights(
  const WeightVector & w_eval, const WeightVector & w_star, std::span<const EnvironmentSpec> envs,
  const PlannerConfig & planner, const RegretReference * reference = nullptr);

/// evaluate_weights applied to the belief's posterior mean.
RegretStats evaluate_posterior(
  const ParticleBelief & belief, const WeightVector & w_star, std::span<const EnvironmentSpec> envs,
  const PlannerConfig & planner, const RegretReference * reference = nullptr);

/// Mean regret on the next environment over mean regret on deployment, both averaged over
/// the same particles. regrets_next[k] and regrets_deploy[k][m] belong to particle k.
/// Throws EvaluationError "posterior already converged" when the denominator is <= 1e-9.
double regret_ratio(std::span<const double> regrets_next, const std::vector<std::vector<double>> & regrets_deploy);

/// Uses `n_particles` particles drawn from the belief (all of them when n_particles <= 0).
/// Degenerate environments contribute zero regret.
double next_env_regret_ratio(
  const ParticleBelief & belief, const WeightVector & w_star, const EnvironmentSpec & proposed_env,
  std::span<const EnvironmentSpec> deploy_envs, const PlannerConfig & planner, int n_particles,
  std::uint64_t seed, const RegretReference * deploy_reference = nullptr);

/// Aggregate violations of the trajectories planned under `weights` in each environment.
ViolationReport evaluate_violations(
  const WeightVector & weights, std::span<const EnvironmentSpec> envs, const PlannerConfig & planner);

struct IterationEntry
{
  int iteration{0};
  ProxyObservation proxy;
  Eigen::MatrixXd particles;  ///< belief snapshot after the update
  Eigen::VectorXd log_weights;
  double entropy{0.0};
  WeightVector posterior_mean;
  WeightVector map_estimate;
  std::optional<RegretStats> regret;
  ViolationReport proxy_violations;      ///< submitted design on the probe set
  ViolationReport posterior_violations;  ///< posterior mean on the probe set
  AcquisitionResult acquisition;
  std::optional<double> regret_ratio;
  std::optional<double> wall_clock_s;
};

struct FinalEvaluation
{
  std::optional<RegretStats> regret;
  ViolationReport violations;
  double violations_mean{0.0};
};

struct SessionRecord
{
  std::string session_id;
  SessionConfig config;
  SessionStatus status{SessionStatus::kAwaitingDesign};
  std::vector<EnvironmentSpec> envs;  ///< grows by one per iteration
  std::optional<EnvironmentSpec> pending_env;
  ParticleBelief belief;  ///< current belief including absorbed evidence
  std::vector<IterationEntry> entries;
  std::optional<FinalEvaluation> final_evaluation;

  int current_iteration() const { return static_cast<int>(entries.size()); }
};

/// Stepwise driver of the design loop: designer query, posterior update, candidate
/// proposal. Both run_session and the HTTP service go through it.
class Session
{
public:
  Session(SessionConfig cfg, std::string session_id);
  static Session from_record(SessionRecord record);

  SessionStatus status() const { return record_.status; }
  int iteration() const { return record_.current_iteration(); }
  const SessionRecord & record() const { return record_; }
  const SessionConfig & config() const { return record_.config; }

  /// Environments the designer designs against at the current iteration.
  std::vector<int> design_env_indices() const;
  std::vector<EnvironmentSpec> design_envs() const;

  /// Proxy the simulated designer would submit now. Requires w*.
  WeightVector simulated_design() const;

  /// Absorbs a design for the current iteration and proposes the next environment.
  void submit(const WeightVector & proxy_weights);

  /// Runs simulated iterations until finished.
  void run();

  const std::vector<EnvironmentSpec> & eval_envs() const;
  const std::vector<EnvironmentSpec> & probe_envs() const;

  /// Evaluation of the current posterior mean (regret needs w*).
  FinalEvaluation evaluate() const;

  /// One acquisition step on the current belief, without changing the session.
  AcquisitionResult propose(AcquisitionMethod method, std::uint64_t seed) const;

private:
  explicit Session(SessionRecord record);
  const RegretReference & eval_reference() const;
  NormalizerSet iteration_normalizer(int iteration) const;

  SessionRecord record_;
  mutable std::optional<std::vector<EnvironmentSpec>> eval_envs_;
  mutable std::optional<std::vector<EnvironmentSpec>> probe_envs_;
  mutable std::optional<RegretReference> eval_reference_;
};

SessionRecord run_session(const SessionConfig & cfg, const std::string & session_id = "session");

struct SuiteConfig
{
  std::vector<AcquisitionMethod> methods{
    AcquisitionMethod::kMaxInfo, AcquisitionMethod::kDifficulty, AcquisitionMethod::kRandom};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  SessionConfig base{};
};

struct SuiteCell
{
  AcquisitionMethod method{AcquisitionMethod::kMaxInfo};
  std::uint64_t seed{0};
  std::optional<SessionRecord> record;
  std::string error;  ///< set when the cell failed
};

struct SuiteRow
{
  AcquisitionMethod method{};
  std::uint64_t seed{0};
  int iteration{0};
  double mean_regret{0.0};
  double regret_p5{0.0};
  double regret_p95{0.0};
  double regret_ratio{0.0};
  double entropy{0.0};
  double violations_mean{0.0};
};

struct SuiteResult
{
  std::vector<SuiteCell> cells;
  std::vector<SuiteRow> rows() const;
};

std::string suite_cell_id(AcquisitionMethod method, std::uint64_t seed);

SuiteResult run_experiment_suite(const SuiteConfig & cfg);

/// Writes session_<id>.json for every cell, suite_summary.csv and suite_summary.json.
void write_suite_outputs(const SuiteResult & result, const std::filesystem::path & out_dir);

std::string suite_csv(const SuiteResult & result);

}  // namespace ard

#endif  // ARD__ORCHESTRATOR_HPP_
