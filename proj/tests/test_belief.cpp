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

#include "ard/belief.hpp"
#include "ard/environment_space.hpp"
#include "ard/error.hpp"
#include "ard/orchestrator.hpp"
#include "ard/rng.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace ard;
using ard::test::empty_env;
using ard::test::forward_ego;

namespace
{

std::vector<EnvironmentSpec> devel_envs(std::size_t n, std::uint64_t seed)
{
  return sample_environments(EnvironmentDistribution::devel(), n, seed);
}

BeliefConfig no_move()
{
  BeliefConfig cfg;
  cfg.move_steps = 0;
  return cfg;
}

}  // namespace

// --- likelihood ---------------------------------------------------------------------

TEST(Likelihood, NormalizerEqualToProxyGivesMinusLogTwo)
{
  const auto envs = devel_envs(2, 1);
  const WeightVector proxy = ard::test::weights({0.5, 0.2, 0.6, 0.4, 0.3, 0.2});
  const NormalizerSet normalizer{{proxy}};
  const DesignEvidence ev = make_evidence(proxy, envs, normalizer, 1.0, ard::test::fast_planner());
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10; ++k) {
    EXPECT_NEAR(normalized_log_likelihood(ard::test::random_unit_weights(rng), ev), -std::log(2.0), 1e-12);
  }
}

TEST(Likelihood, ZeroBetaIsUniformOverNormalizer)
{
  const auto envs = devel_envs(1, 2);
  std::mt19937_64 rng(2);
  NormalizerSet normalizer;
  for (int j = 0; j < 7; ++j) normalizer.samples.push_back(ard::test::random_unit_weights(rng));
  const DesignEvidence ev =
    make_evidence(ard::test::random_unit_weights(rng), envs, normalizer, 0.0, ard::test::fast_planner());
  for (int k = 0; k < 10; ++k) {
    EXPECT_NEAR(normalized_log_likelihood(ard::test::random_unit_weights(rng), ev), -std::log(8.0), 1e-12);
  }
}

TEST(Likelihood, TwoProxyToyMatchesEnumeration)
{
  const auto envs = devel_envs(2, 3);
  const PlannerConfig planner = ard::test::fast_planner();
  const WeightVector a = ard::test::weights({0.5, 0.2, 0.6, 0.4, 0.3, 0.2});
  const WeightVector b = ard::test::weights({0.1, 0.9, 0.0, 0.2, 0.1, 0.0});
  // Exact model over the discrete proxy set {a, b}.
  Eigen::VectorXd phi_a = Eigen::VectorXd::Zero(6), phi_b = Eigen::VectorXd::Zero(6);
  for (const auto & env : envs) {
    phi_a += plan(a, env, planner).features.values;
    phi_b += plan(b, env, planner).features.values;
  }
  const double beta = 2.0;
  const DesignEvidence ev = make_evidence(a, envs, NormalizerSet{{b}}, beta, planner);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    const WeightVector w = ard::test::random_unit_weights(rng);
    const double ea = std::exp(beta * w.values.dot(phi_a));
    const double eb = std::exp(beta * w.values.dot(phi_b));
    EXPECT_NEAR(normalized_log_likelihood(w, ev), std::log(ea / (ea + eb)), 1e-10);
  }
}

TEST(Likelihood, EmptyNormalizerThrows)
{
  const auto envs = devel_envs(1, 4);
  EXPECT_THROW(make_evidence(WeightVector{}, envs, NormalizerSet{}, 1.0, ard::test::fast_planner()), Error);
  DesignEvidence ev;
  ev.proxy_features = Eigen::VectorXd::Zero(6);
  ev.normalizer_features.resize(0, 6);
  EXPECT_THROW(normalized_log_likelihood(WeightVector{}, ev), Error);
}

// --- designer potential -------------------------------------------------------------

TEST(Potential, ZeroBetaIsZero)
{
  const auto envs = devel_envs(2, 5);
  std::mt19937_64 rng(5);
  EXPECT_EQ(designer_log_potential(ard::test::random_unit_weights(rng), ard::test::random_unit_weights(rng), envs,
                                   0.0, PlannerConfig{}),
            0.0);
}

TEST(Potential, TrueWeightsAreBestProxy)
{
  const auto envs = devel_envs(2, 6);
  std::mt19937_64 rng(6);
  const PlannerConfig planner;
  const WeightVector w_true = ard::test::random_unit_weights(rng);
  const double own = designer_log_potential(w_true, w_true, envs, 1.0, planner);
  for (int k = 0; k < 10; ++k) {
    const double other = designer_log_potential(w_true, ard::test::random_unit_weights(rng), envs, 1.0, planner);
    EXPECT_GE(own, other - 1e-3);
  }
}

TEST(Potential, HandEvaluatedTwoStepToy)
{
  // Speed-only proxy at v_goal with no friction keeps controls at zero, so the ego moves
  // straight ahead: x stays 0, lane feature exp(-0.25 / (2 * 0.15^2)) per step.
  EnvironmentSpec env = empty_env(forward_ego(0.0, 0.0, 1.0));
  env.physics.alpha = 0.0;
  PlannerConfig planner;
  planner.horizon = 2;
  planner.replan_every = 2;
  const WeightVector proxy = WeightVector::basis(Feature::kSpeed);
  const WeightVector w_true = ard::test::weights({0.0, 0.0, 1.0, 0.0, 0.0, -2.0});
  const double lane = 2.0 * std::exp(-0.25 / (2.0 * 0.15 * 0.15));
  EXPECT_NEAR(designer_log_potential(w_true, proxy, std::span(&env, 1), 0.5, planner), 0.5 * lane, 1e-9);
}

TEST(Potential, InvariantToProxyRescaling)
{
  const auto envs = devel_envs(2, 7);
  std::mt19937_64 rng(7);
  const WeightVector w_true = ard::test::random_unit_weights(rng);
  const WeightVector proxy = ard::test::random_unit_weights(rng);
  const double base = designer_log_potential(w_true, proxy, envs, 1.0, PlannerConfig{});
  for (double c : {0.2, 5.0, 40.0}) {
    EXPECT_NEAR(designer_log_potential(w_true, WeightVector(c * proxy.values), envs, 1.0, PlannerConfig{}), base, 1e-3);
  }
}

// --- simulated designer -------------------------------------------------------------

TEST(Designer, HugeBetaPicksArgmax)
{
  const auto envs = devel_envs(2, 8);
  DesignerModelConfig cfg;
  cfg.beta_forward = 1e6;
  cfg.n_designer_candidates = 12;
  const WeightVector w_star = default_true_weights();
  const DesignerDraw draw = draw_designer(w_star, envs, cfg, ard::test::fast_planner(), 8);
  const auto best = std::max_element(draw.log_potentials.begin(), draw.log_potentials.end());
  EXPECT_EQ(draw.chosen, static_cast<std::size_t>(best - draw.log_potentials.begin()));
  EXPECT_EQ(draw.proxy.weights, draw.candidates[draw.chosen]);
}

TEST(Designer, HugeBetaReturnsTrueWeightsWhenAmongCandidates)
{
  const auto envs = devel_envs(2, 9);
  DesignerModelConfig cfg;
  cfg.beta_forward = 1e6;
  cfg.designer_noise = 0.0;
  cfg.n_designer_candidates = 3;
  const WeightVector w_star = default_true_weights();
  const ProxyObservation p = simulate_designer(w_star, envs, cfg, ard::test::fast_planner(), 9);
  EXPECT_TRUE(p.weights.values.isApprox(w_star.normalized().values, 1e-12));
}

TEST(Designer, ZeroBetaIsUniformChiSquare)
{
  const auto envs = devel_envs(1, 10);
  DesignerModelConfig cfg;
  cfg.beta_forward = 0.0;
  cfg.n_designer_candidates = 10;
  std::vector<int> counts(10, 0);
  const WeightVector w_star = default_true_weights();
  for (std::uint64_t s = 0; s < 10000; ++s) {
    ++counts[draw_designer(w_star, envs, cfg, PlannerConfig{}, derive_seed(1234, {s})).chosen];
  }
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  // Upper 1% point of chi-square with 9 degrees of freedom.
  EXPECT_LT(chi2, 21.666);
}

TEST(Designer, FixedSeedIsReproducible)
{
  const auto envs = devel_envs(2, 11);
  const DesignerModelConfig cfg;
  const WeightVector w_star = default_true_weights();
  const ProxyObservation a = simulate_designer(w_star, envs, cfg, ard::test::fast_planner(), 77);
  const ProxyObservation b = simulate_designer(w_star, envs, cfg, ard::test::fast_planner(), 77);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.env_indices, b.env_indices);
}

TEST(Designer, ScaledBetaRule)
{
  DesignerModelConfig cfg;
  cfg.beta_forward = 0.1;
  EXPECT_DOUBLE_EQ(cfg.forward_beta(4), 0.025);
  cfg.beta_forward_rule = BetaRule::kFixed;
  EXPECT_DOUBLE_EQ(cfg.forward_beta(4), 0.1);
}

TEST(Designer, NoEnvironmentsThrows)
{
  EXPECT_THROW(simulate_designer(WeightVector{}, {}, DesignerModelConfig{}, PlannerConfig{}, 1), Error);
}

// --- updates ------------------------------------------------------------------------

TEST(Update, ZeroBetaIsBootstrapOfPrior)
{
  const auto envs = devel_envs(2, 12);
  const ParticleBelief prior = make_prior_belief(BoxPrior::cube(6), 50, 12);
  const NormalizerSet normalizer = draw_normalizer(prior, 8, 1);
  DesignerModelConfig model;
  model.beta_inverse = 0.0;
  ProxyObservation proxy;
  proxy.weights = ard::test::weights({1, 0, 0, 0, 0, 0});
  proxy.env_indices = {0, 1};
  const ParticleBelief post =
    update_joint(prior, proxy, envs, normalizer, model, no_move(), ard::test::fast_planner());
  EXPECT_EQ(post.generation, 1);
  EXPECT_TRUE(post.log_weights.isApprox(prior.log_weights));
  // Equal weights under systematic resampling keep every particle exactly once.
  EXPECT_EQ(post.particles, prior.particles);

  proxy.scope = DesignScope::kIndependent;
  const ParticleBelief ind =
    update_independent(prior, proxy, envs[0], normalizer, model, no_move(), ard::test::fast_planner());
  EXPECT_EQ(ind.particles, prior.particles);
}

TEST(Update, ResamplingFollowsLikelihoodRatio)
{
  // A = e_speed, B = 0. With n zero normalizer rows and proxy features e_speed,
  // log L(A) - log L(B) = beta - log((n + e^beta) / (n + 1)); solve for a ratio of e.
  const int n = 32;
  auto gap = [n](double beta) { return beta - std::log((n + std::exp(beta)) / (n + 1.0)); };
  double lo = 0.0, hi = 20.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < 1.0 ? lo : hi) = mid;
  }
  DesignEvidence ev;
  ev.beta = 0.5 * (lo + hi);
  ev.proxy_features = Eigen::VectorXd::Zero(6);
  ev.proxy_features[0] = 1.0;
  ev.normalizer_features = Eigen::MatrixXd::Zero(n, 6);

  ParticleBelief belief;
  belief.prior = BoxPrior::cube(6);
  belief.particles = Eigen::MatrixXd::Zero(2, 6);
  belief.particles(0, 0) = 1.0;
  belief.log_weights = Eigen::VectorXd::Constant(2, -std::log(2.0));
  ASSERT_NEAR(ev.log_likelihood(belief.particles.row(0).transpose()) -
                ev.log_likelihood(belief.particles.row(1).transpose()),
              1.0, 1e-9);

  const int trials = 10000;
  double count_a = 0.0;
  for (int t = 0; t < trials; ++t) {
    belief.seed = derive_seed(99, {static_cast<std::uint64_t>(t)});
    const ParticleBelief post = apply_evidence(belief, ev, no_move());
    for (Eigen::Index i = 0; i < 2; ++i) count_a += post.particles(i, 0) == 1.0 ? 1.0 : 0.0;
  }
  const double p = std::numbers::e / (1.0 + std::numbers::e);
  // With two slots, A is drawn twice with probability 2p - 1 and once otherwise.
  const double q = 2.0 * p - 1.0;
  const double expected = trials * (1.0 + q);
  const double sd = std::sqrt(trials * q * (1.0 - q));
  EXPECT_NEAR(count_a, expected, 3.0 * sd);
  EXPECT_NEAR(count_a / (2.0 * trials - count_a), std::numbers::e, 0.1);
}

TEST(Update, GridPosteriorTotalVariation)
{
  const auto toy = ard::test::make_grid_toy(1);
  EXPECT_LE(ard::test::grid_toy_particle_tv(toy), 0.15);
}

TEST(Update, IndependentEqualsJointWithOneEnvironment)
{
  const auto envs = devel_envs(1, 13);
  const ParticleBelief prior = make_prior_belief(BoxPrior::cube(6), 40, 13);
  const NormalizerSet normalizer = draw_normalizer(prior, 8, 2);
  ProxyObservation joint;
  joint.weights = ard::test::weights({0.3, 0.2, 0.5, 0.6, 0.4, 0.1});
  joint.env_indices = {0};
  ProxyObservation ind = joint;
  ind.scope = DesignScope::kIndependent;
  const PlannerConfig planner = ard::test::fast_planner();
  const ParticleBelief a = update_joint(prior, joint, envs, normalizer, DesignerModelConfig{}, BeliefConfig{}, planner);
  const ParticleBelief b =
    update_independent(prior, ind, envs[0], normalizer, DesignerModelConfig{}, BeliefConfig{}, planner);
  EXPECT_EQ(a.particles, b.particles);
  EXPECT_EQ(a.log_weights, b.log_weights);
}

TEST(Update, ScopeMismatchThrows)
{
  const auto envs = devel_envs(1, 14);
  const ParticleBelief prior = make_prior_belief(BoxPrior::cube(6), 10, 14);
  const NormalizerSet normalizer = draw_normalizer(prior, 2, 2);
  ProxyObservation p;
  p.scope = DesignScope::kIndependent;
  EXPECT_THROW(update_joint(prior, p, envs, normalizer, DesignerModelConfig{}, BeliefConfig{}, PlannerConfig{}), Error);
  p.scope = DesignScope::kJoint;
  EXPECT_THROW(
    update_independent(prior, p, envs[0], normalizer, DesignerModelConfig{}, BeliefConfig{}, PlannerConfig{}), Error);
}

TEST(Update, SequentialIndependentUpdatesCommute)
{
  const auto toy_a = ard::test::make_grid_toy(21, 1);
  auto toy_b = toy_a;
  toy_b.envs = devel_envs(1, 22);
  Eigen::VectorXd proxy_b = toy_a.proxy.values;
  proxy_b[toy_a.dim_a] = 0.9;
  proxy_b[toy_a.dim_b] = 0.3;
  toy_b.proxy = WeightVector(proxy_b);
  toy_b.evidence = make_evidence(toy_b.proxy, toy_b.envs, toy_b.normalizer, toy_b.evidence.beta, toy_b.planner);

  const ParticleBelief prior = make_prior_belief(toy_a.prior, 2000, 23);
  const ParticleBelief ab = apply_evidence(apply_evidence(prior, toy_a.evidence, BeliefConfig{}), toy_b.evidence, BeliefConfig{});
  const ParticleBelief ba = apply_evidence(apply_evidence(prior, toy_b.evidence, BeliefConfig{}), toy_a.evidence, BeliefConfig{});
  const auto exact = ard::test::grid_posterior(toy_a, {toy_a.evidence, toy_b.evidence});
  const auto h_ab = ard::test::particle_histogram(toy_a, ab);
  const auto h_ba = ard::test::particle_histogram(toy_a, ba);
  EXPECT_LE(ard::test::total_variation(h_ab, exact), 0.15);
  EXPECT_LE(ard::test::total_variation(h_ba, exact), 0.15);
  EXPECT_LE(ard::test::total_variation(h_ab, h_ba), 0.2);
  std::mt19937_64 rng(24);
  for (int k = 0; k < 5; ++k) {
    const Eigen::VectorXd w = toy_a.prior.sample(rng);
    EXPECT_NEAR(ab.log_posterior(w), ba.log_posterior(w), 1e-9);
  }
}

TEST(Update, ResamplingPreservesExpectation)
{
  const auto toy = ard::test::make_grid_toy(3, 3, 1.0);
  const ParticleBelief prior = make_prior_belief(toy.prior, 1000, 31);
  const ParticleBelief weighted = reweight(prior, toy.evidence);
  const Eigen::VectorXd wts = weighted.weights();
  const Eigen::VectorXd before = weighted.particles.transpose() * wts;
  const ParticleBelief after = apply_evidence(prior, toy.evidence, no_move());
  const Eigen::VectorXd mean_after = after.particles.colwise().mean().transpose();
  for (int d : {toy.dim_a, toy.dim_b}) {
    // Systematic resampling variance is below multinomial; bound by the multinomial 3 sigma.
    double var = 0.0;
    for (Eigen::Index i = 0; i < prior.particles.rows(); ++i) {
      var += wts[i] * std::pow(weighted.particles(i, d) - before[d], 2);
    }
    const double sd = std::sqrt(var / static_cast<double>(prior.size()));
    EXPECT_NEAR(mean_after[d], before[d], 3.0 * sd + 1e-12);
  }
}

TEST(Update, DegeneratePosteriorThrows)
{
  ParticleBelief b = make_prior_belief(BoxPrior::cube(6), 5, 1);
  b.log_weights.setConstant(-std::numeric_limits<double>::infinity());
  DesignEvidence ev;
  ev.proxy_features = Eigen::VectorXd::Zero(6);
  ev.normalizer_features = Eigen::MatrixXd::Zero(1, 6);
  EXPECT_THROW(reweight(b, ev), DegeneratePosteriorError);
}

TEST(Update, DeterministicGivenSeed)
{
  const auto toy = ard::test::make_grid_toy(4);
  const ParticleBelief prior = make_prior_belief(toy.prior, 200, 41);
  const ParticleBelief a = apply_evidence(prior, toy.evidence, BeliefConfig{});
  const ParticleBelief b = apply_evidence(prior, toy.evidence, BeliefConfig{});
  EXPECT_EQ(a.particles, b.particles);
  EXPECT_EQ(a.map_estimate(), b.map_estimate());
}

TEST(Belief, PosteriorMeanAndMap)
{
  ParticleBelief b;
  b.prior = BoxPrior::cube(2);
  b.particles.resize(2, 2);
  b.particles << 0.5, 0.0, 0.0, -0.25;
  b.log_weights = Eigen::Vector2d(std::log(0.75), std::log(0.25));
  EXPECT_TRUE(b.posterior_mean().values.isApprox(Eigen::Vector2d(0.75, -0.25)));
  // No evidence: every particle has the same log posterior, so MAP is the first.
  EXPECT_EQ(b.map_estimate().values, Eigen::Vector2d(0.5, 0.0));
  EXPECT_EQ(b.log_posterior(Eigen::Vector2d(1.5, 0.0)), -std::numeric_limits<double>::infinity());
}

TEST(Belief, PriorSamplesStayInBox)
{
  const ParticleBelief b = make_prior_belief(BoxPrior::cube(6, 0.5), 500, 3);
  for (Eigen::Index i = 0; i < b.particles.rows(); ++i) EXPECT_TRUE(b.prior.contains(b.particles.row(i).transpose()));
  EXPECT_NEAR(std::exp(b.log_weights[0]) * 500, 1.0, 1e-12);
}

// --- entropy ------------------------------------------------------------------------

TEST(Entropy, IdenticalParticlesGiveFloor)
{
  ParticleBelief b = make_prior_belief(BoxPrior::cube(6), 20, 1);
  for (Eigen::Index i = 0; i < 20; ++i) b.particles.row(i) = b.particles.row(0);
  const double expected = 0.5 * 6 * std::log(2 * std::numbers::pi * std::numbers::e * kEntropyRidge);
  EXPECT_NEAR(entropy(b), expected, 1e-9);
}

TEST(Entropy, StandardGaussianInTwoDimensions)
{
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd x(5000, 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i) << n(rng), n(rng);
  const double h = gaussian_entropy(x, Eigen::VectorXd::Ones(5000));
  EXPECT_NEAR(h, std::log(2 * std::numbers::pi * std::numbers::e), 0.06);
}

TEST(Entropy, ScalingByTwoAddsDLogTwo)
{
  const ParticleBelief b = make_prior_belief(BoxPrior::cube(6), 300, 7);
  ParticleBelief scaled = b;
  scaled.particles *= 2.0;
  EXPECT_NEAR(entropy(scaled) - entropy(b), 6 * std::log(2.0), 1e-4);
}

TEST(Entropy, TooFewParticlesThrows)
{
  EXPECT_THROW(entropy(make_prior_belief(BoxPrior::cube(6), 7, 1)), Error);
  EXPECT_NO_THROW(entropy(make_prior_belief(BoxPrior::cube(6), 8, 1)));
}

// --- augmentation -------------------------------------------------------------------

TEST(Augment, ZeroFeatureMarginalEqualsPrior)
{
  const auto r = ard::test::zero_feature_marginal(ard::test::make_grid_toy(5));
  EXPECT_EQ(r.dim, 7u);
  EXPECT_GT(r.p_value, 0.01) << "KS statistic " << r.ks_statistic;
}

TEST(Augment, NoNewFeaturesMatchesParticleFilter)
{
  const auto toy = ard::test::make_grid_toy(6);
  const auto r = ard::test::no_new_feature_equivalence(toy);
  EXPECT_LE(r.tv_particle_filter, 0.2);
  EXPECT_LE(r.tv_grid, 0.2);
  // Recomputed evidence is the particle filter's evidence.
  ASSERT_EQ(r.mcmc.evidence.size(), 1u);
  EXPECT_TRUE(r.mcmc.evidence[0].proxy_features.isApprox(toy.evidence.proxy_features, 1e-12));
  EXPECT_TRUE(r.mcmc.evidence[0].normalizer_features.isApprox(toy.evidence.normalizer_features, 1e-12));
}

TEST(Augment, ChainsFromDistantStartsAgree)
{
  const auto toy = ard::test::make_grid_toy(7);
  const auto evidence =
    augment_evidence(ard::test::toy_designs(toy), toy.envs, toy.prior, FeatureSpace::base(), ard::test::toy_mcmc(toy), toy.planner);
  std::vector<ParticleBelief> chains;
  for (double corner : {-0.95, 0.95}) {
    McmcConfig m = ard::test::toy_mcmc(toy);
    Eigen::VectorXd start = toy.prior.lower;
    start[toy.dim_a] = corner;
    start[toy.dim_b] = corner;
    m.initial_point = start;
    m.seed = corner < 0 ? 71 : 72;
    chains.push_back(sample_posterior_mcmc(toy.prior, evidence, m));
  }
  // Gelman-Rubin potential scale reduction for each free dimension.
  for (int d : {toy.dim_a, toy.dim_b}) {
    const double n = static_cast<double>(chains[0].size());
    double means[2], vars[2];
    for (int c = 0; c < 2; ++c) {
      const Eigen::VectorXd col = chains[static_cast<std::size_t>(c)].particles.col(d);
      means[c] = col.mean();
      vars[c] = (col.array() - means[c]).square().sum() / (n - 1);
    }
    const double grand = 0.5 * (means[0] + means[1]);
    const double b = n * (std::pow(means[0] - grand, 2) + std::pow(means[1] - grand, 2));
    const double w = 0.5 * (vars[0] + vars[1]);
    const double r_hat = std::sqrt(((n - 1) / n * w + b / n) / w);
    EXPECT_LT(r_hat, 1.1) << "dimension " << d;
  }
}

TEST(Augment, MissingTrajectoriesThrow)
{
  const auto toy = ard::test::make_grid_toy(8, 1);
  auto designs = ard::test::toy_designs(toy);
  designs[0].trajectories.clear();
  EXPECT_THROW(augment_evidence(designs, toy.envs, toy.prior, FeatureSpace::base(), ard::test::toy_mcmc(toy), toy.planner),
               DimensionError);
}

TEST(Augment, LowAcceptanceThrows)
{
  const auto toy = ard::test::make_grid_toy(9, 1);
  McmcConfig m = ard::test::toy_mcmc(toy);
  m.burn_in = 0;
  m.initial_scale = 1e4;
  m.n_samples = 50;
  EXPECT_THROW(sample_posterior_mcmc(toy.prior, {toy.evidence}, m), Error);
}
