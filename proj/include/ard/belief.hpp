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

#ifndef ARD__BELIEF_HPP_
#define ARD__BELIEF_HPP_

#include "ard/driving_env.hpp"
#include "ard/planner.hpp"
#include "ard/rng.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ard
{

enum class DesignScope { kJoint, kIndependent };
enum class BetaRule { kFixed, kScaledByEnvCount };

struct DesignerModelConfig
{
  double beta_forward{0.1};   ///< rationality of the simulated designer
  double beta_inverse{1.0};   ///< rationality assumed by inference
  BetaRule beta_forward_rule{BetaRule::kScaledByEnvCount};
  int n_normalizer_samples{32};
  int n_designer_candidates{50};
  double designer_noise{0.3};  ///< std of the Gaussian perturbation around w* for candidates

  /// Forward beta for a designer looking at `n_envs` environments.
  double forward_beta(std::size_t n_envs) const;
  void validate() const;
  bool operator==(const DesignerModelConfig &) const = default;
};

/// Settings of the particle filter's resample-move step.
struct BeliefConfig
{
  int n_particles{100};
  int move_steps{5};       ///< Metropolis-Hastings rejuvenation steps after resampling
  double move_scale{0.5};  ///< random-walk scale relative to the cloud's per-dimension std

  void validate() const;
  bool operator==(const BeliefConfig &) const = default;
};

/// Uniform prior over an axis-aligned box. Dimensions with lower == upper are fixed.
struct BoxPrior
{
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static BoxPrior cube(std::size_t dim, double half_width = 1.0);
  std::size_t dim() const { return static_cast<std::size_t>(lower.size()); }
  bool contains(const Eigen::VectorXd & w) const;
  Eigen::VectorXd sample(Rng & rng) const;
  bool operator==(const BoxPrior &) const = default;
};

struct ProxyObservation
{
  WeightVector weights;
  DesignScope scope{DesignScope::kJoint};
  std::vector<int> env_indices;  ///< environments the designer saw
};

/// Everything the likelihood of one proxy needs: the proxy's feature sum and the
/// normalizer samples' feature sums over the same environments.
struct DesignEvidence
{
  Eigen::VectorXd proxy_features;
  Eigen::MatrixXd normalizer_features;  ///< one row per normalizer sample
  double beta{1.0};

  /// beta w.phi_proxy - log(sum_j exp(beta w.phi_j) + exp(beta w.phi_proxy)).
  double log_likelihood(const Eigen::VectorXd & w) const;
};

/// Weighted particle approximation of the posterior over reward weights, together with
/// the evidence absorbed so far (needed for move steps and MAP lookup).
struct ParticleBelief
{
  Eigen::MatrixXd particles;   ///< N_p x d
  Eigen::VectorXd log_weights;  ///< normalized (logsumexp = 0)
  int generation{0};
  std::uint64_t seed{0};
  BoxPrior prior;
  std::vector<DesignEvidence> evidence;

  std::size_t size() const { return static_cast<std::size_t>(particles.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(particles.cols()); }
  WeightVector particle(std::size_t i) const;
  Eigen::VectorXd weights() const;
  /// Log prior plus the log-likelihood of every absorbed observation.
  double log_posterior(const Eigen::VectorXd & w) const;
  /// Weighted mean of the unit-normalized particles.
  WeightVector posterior_mean() const;
  /// Particle with the highest log posterior (lowest index on ties).
  WeightVector map_estimate() const;
};

ParticleBelief make_prior_belief(const BoxPrior & prior, std::size_t n_particles, std::uint64_t seed);

/// Proxies drawn from the current belief, shared by every particle's normalizer in one
/// iteration. Feature sums are planned per environment on demand.
struct NormalizerSet
{
  std::vector<WeightVector> samples;

  /// n_samples x d matrix of feature sums of each sample's planned trajectory on `env`.
  Eigen::MatrixXd features(
    const EnvironmentSpec & env, const PlannerConfig & planner, const FeatureSpace & space) const;
};

NormalizerSet draw_normalizer(const ParticleBelief & belief, std::size_t n, std::uint64_t seed);

/// Feature sums of plan(w, env) accumulated over `envs`.
Eigen::VectorXd planned_feature_sum(
  const WeightVector & w, std::span<const EnvironmentSpec> envs, const PlannerConfig & planner,
  const FeatureSpace & space = FeatureSpace::base());

/// sum_i beta R_{w_true}(xi_{w_proxy, M_i}); unnormalized.
double designer_log_potential(
  const WeightVector & w_true, const WeightVector & w_proxy, std::span<const EnvironmentSpec> envs,
  double beta, const PlannerConfig & planner, const FeatureSpace & space = FeatureSpace::base());

/// Plans the proxy and the normalizer samples on `envs` and packages the result.
/// `normalizer_features` lists one precomputed matrix per env; empty means plan them here.
DesignEvidence make_evidence(
  const WeightVector & w_proxy, std::span<const EnvironmentSpec> envs, const NormalizerSet & normalizer,
  double beta, const PlannerConfig & planner, const FeatureSpace & space = FeatureSpace::base(),
  std::span<const Eigen::MatrixXd> normalizer_features = {});

double normalized_log_likelihood(const WeightVector & w_true, const DesignEvidence & evidence);

/// Outcome of one simulated design query, with the audit trail of the softmax draw.
struct DesignerDraw
{
  ProxyObservation proxy;
  std::vector<WeightVector> candidates;
  std::vector<double> log_potentials;
  std::size_t chosen{0};
};

/// Index drawn with probability proportional to exp(log_potentials).
std::size_t sample_softmax(std::span<const double> log_potentials, Rng & rng);

DesignerDraw draw_designer(
  const WeightVector & w_star, std::span<const EnvironmentSpec> envs, const DesignerModelConfig & cfg,
  const PlannerConfig & planner, std::uint64_t seed, const FeatureSpace & space = FeatureSpace::base());

ProxyObservation simulate_designer(
  const WeightVector & w_star, std::span<const EnvironmentSpec> envs, const DesignerModelConfig & cfg,
  const PlannerConfig & planner, std::uint64_t seed, const FeatureSpace & space = FeatureSpace::base());

/// Indices selected by systematic resampling with offset u in [0, 1).
std::vector<std::size_t> systematic_resample(const Eigen::VectorXd & weights, std::size_t n, double u);

/// Importance step only: log_weights += log-likelihood, renormalized. Throws
/// DegeneratePosteriorError when every weight becomes -inf.
ParticleBelief reweight(const ParticleBelief & belief, const DesignEvidence & evidence);

/// Reweight, systematic resampling to N_p equal weights, then move_steps of
/// Metropolis-Hastings targeting the full posterior. generation += 1.
ParticleBelief apply_evidence(const ParticleBelief & belief, DesignEvidence evidence, const BeliefConfig & cfg);

/// Update with a proxy designed against every environment in `all_envs`.
ParticleBelief update_joint(
  const ParticleBelief & belief, const ProxyObservation & proxy, std::span<const EnvironmentSpec> all_envs,
  const NormalizerSet & normalizer, const DesignerModelConfig & model, const BeliefConfig & cfg,
  const PlannerConfig & planner, const FeatureSpace & space = FeatureSpace::base());

/// Update with a proxy designed against `new_env` alone.
ParticleBelief update_independent(
  const ParticleBelief & belief, const ProxyObservation & proxy, const EnvironmentSpec & new_env,
  const NormalizerSet & normalizer, const DesignerModelConfig & model, const BeliefConfig & cfg,
  const PlannerConfig & planner, const FeatureSpace & space = FeatureSpace::base());

inline constexpr double kEntropyRidge = 1e-6;

/// Differential entropy of the Gaussian fitted to weighted samples:
/// 0.5 log det(2 pi e (Sigma + ridge I)).
double gaussian_entropy(const Eigen::MatrixXd & samples, const Eigen::VectorXd & weights, double ridge = kEntropyRidge);

/// Entropy of the belief's particle cloud. Requires N_p >= d + 2.
double entropy(const ParticleBelief & belief);

// --- Posterior over an augmented feature space --------------------------------------

/// A historical design: its proxy (possibly lower-dimensional) and the trajectories the
/// proxy produced on the environments it was designed against.
struct ObservedDesign
{
  ProxyObservation proxy;
  std::vector<Trajectory> trajectories;  ///< aligned with proxy.env_indices
};

struct McmcConfig
{
  int n_samples{500};
  int burn_in{2000};
  int thin{10};
  double initial_scale{0.2};  ///< proposal std as a fraction of each dimension's half-span
  double target_acceptance{0.3};
  int adapt_interval{100};
  int n_normalizer_samples{32};
  double beta{1.0};
  std::optional<Eigen::VectorXd> initial_point;
  std::uint64_t seed{0};
};

/// Recomputes each design's evidence in `space` (which may have more features than the
/// designs were made with). Normalizer proxies are drawn from `prior` and planned in `space`.
std::vector<DesignEvidence> augment_evidence(
  std::span<const ObservedDesign> designs, std::span<const EnvironmentSpec> envs, const BoxPrior & prior,
  const FeatureSpace & space, const McmcConfig & mcmc, const PlannerConfig & planner);

/// Random-walk Metropolis-Hastings over `prior` times the evidence likelihoods. During
/// burn-in the per-dimension proposal scale follows the chain's spread and a global factor
/// is tuned toward the target acceptance rate. Returns thinned draws as an equally
/// weighted belief. Throws Error if the post-adaptation acceptance rate is below 1%.
ParticleBelief sample_posterior_mcmc(
  const BoxPrior & prior, std::vector<DesignEvidence> evidence, const McmcConfig & mcmc);

/// augment_evidence followed by sample_posterior_mcmc. `space.extra_count()` is the number
/// of new dimensions.
ParticleBelief augment_posterior(
  std::span<const ObservedDesign> designs, std::span<const EnvironmentSpec> envs, const BoxPrior & prior,
  const FeatureSpace & space, const McmcConfig & mcmc, const PlannerConfig & planner);

}  // namespace ard

#endif  // ARD__BELIEF_HPP_
