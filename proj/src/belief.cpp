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

#include "ard/error.hpp"
#include "ard/parallel.hpp"
#include "ard/rng.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ard
{

namespace
{

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp(const Eigen::VectorXd & v)
{
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

double DesignerModelConfig::forward_beta(std::size_t n_envs) const
{
  if (beta_forward_rule == BetaRule::kScaledByEnvCount && n_envs > 0) {
    return beta_forward / static_cast<double>(n_envs);
  }
  return beta_forward;
}

void DesignerModelConfig::validate() const
{
  if (!(beta_forward >= 0.0) || !(beta_inverse >= 0.0)) {
    throw ConfigError("designer_model: betas must be non-negative");
  }
  if (n_normalizer_samples < 1) throw ConfigError("designer_model: n_normalizer_samples must be >= 1");
  if (n_designer_candidates < 1) throw ConfigError("designer_model: n_designer_candidates must be >= 1");
  if (!(designer_noise >= 0.0)) throw ConfigError("designer_model: designer_noise must be >= 0");
}

void BeliefConfig::validate() const
{
  if (n_particles < 1) throw ConfigError("belief: n_particles must be >= 1");
  if (move_steps < 0) throw ConfigError("belief: move_steps must be >= 0");
  if (!(move_scale > 0.0)) throw ConfigError("belief: move_scale must be positive");
}

BoxPrior BoxPrior::cube(std::size_t dim, double half_width)
{
  const auto d = static_cast<Eigen::Index>(dim);
  return BoxPrior{Eigen::VectorXd::Constant(d, -half_width), Eigen::VectorXd::Constant(d, half_width)};
}

bool BoxPrior::contains(const Eigen::VectorXd & w) const
{
  return ((w.array() >= lower.array()) && (w.array() <= upper.array())).all();
}

Eigen::VectorXd BoxPrior::sample(Rng & rng) const
{
  Eigen::VectorXd w(lower.size());
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = lower[i] + (upper[i] - lower[i]) * unif(rng);
  return w;
}

double DesignEvidence::log_likelihood(const Eigen::VectorXd & w) const
{
  const double own = beta * w.dot(proxy_features);
  Eigen::VectorXd terms(normalizer_features.rows() + 1);
  terms.head(normalizer_features.rows()) = beta * (normalizer_features * w);
  terms[normalizer_features.rows()] = own;
  return own - logsumexp(terms);
}

WeightVector ParticleBelief::particle(std::size_t i) const
{
  return WeightVector(particles.row(static_cast<Eigen::Index>(i)).transpose());
}

Eigen::VectorXd ParticleBelief::weights() const
{
  return log_weights.array().exp();
}

double ParticleBelief::log_posterior(const Eigen::VectorXd & w) const
{
  if (!prior.contains(w)) return kNegInf;
  double lp = 0.0;
  for (const auto & e : evidence) lp += e.log_likelihood(w);
  return lp;
}

WeightVector ParticleBelief::posterior_mean() const
{
  const Eigen::VectorXd wts = weights();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(particles.cols());
  for (Eigen::Index i = 0; i < particles.rows(); ++i) {
    const double n = particles.row(i).norm();
    if (n > 0.0) mean += wts[i] * particles.row(i).transpose() / n;
  }
  return WeightVector(mean);
}

WeightVector ParticleBelief::map_estimate() const
{
  Eigen::Index best = 0;
  double best_lp = kNegInf;
  for (Eigen::Index i = 0; i < particles.rows(); ++i) {
    const double lp = log_posterior(particles.row(i).transpose());
    if (lp > best_lp) {
      best_lp = lp;
      best = i;
    }
  }
  return particle(static_cast<std::size_t>(best));
}

ParticleBelief make_prior_belief(const BoxPrior & prior, std::size_t n_particles, std::uint64_t seed)
{
  if (n_particles == 0) throw ConfigError("belief: N_p must be >= 1");
  ParticleBelief b;
  b.prior = prior;
  b.seed = seed;
  b.particles.resize(static_cast<Eigen::Index>(n_particles), static_cast<Eigen::Index>(prior.dim()));
  Rng rng(derive_seed(seed, {stream::kPrior}));
  for (Eigen::Index i = 0; i < b.particles.rows(); ++i) b.particles.row(i) = prior.sample(rng).transpose();
  b.log_weights = Eigen::VectorXd::Constant(b.particles.rows(), -std::log(static_cast<double>(n_particles)));
  return b;
}

Eigen::MatrixXd NormalizerSet::features(
  const EnvironmentSpec & env, const PlannerConfig & planner, const FeatureSpace & space) const
{
  const std::vector<EnvironmentSpec> envs(samples.size(), env);
  const auto trajs = plan_batch(samples, envs, planner, space);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(space.size()));
  for (std::size_t j = 0; j < trajs.size(); ++j) {
    out.row(static_cast<Eigen::Index>(j)) = trajs[j].features.values.transpose();
  }
  return out;
}

NormalizerSet draw_normalizer(const ParticleBelief & belief, std::size_t n, std::uint64_t seed)
{
  NormalizerSet set;
  Rng rng(seed);
  const Eigen::VectorXd w = belief.weights();
  std::vector<double> cdf(static_cast<std::size_t>(w.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) cdf[static_cast<std::size_t>(i)] = (acc += w[i]);
  std::uniform_real_distribution<double> unif(0.0, acc);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = unif(rng);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    set.samples.push_back(belief.particle(idx));
  }
  return set;
}

Eigen::VectorXd planned_feature_sum(
  const WeightVector & w, std::span<const EnvironmentSpec> envs, const PlannerConfig & planner,
  const FeatureSpace & space)
{
  const std::vector<WeightVector> ws(envs.size(), w);
  const auto trajs = plan_batch(ws, envs, planner, space);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
  for (const auto & t : trajs) sum += t.features.values;
  return sum;
}

double designer_log_potential(
  const WeightVector & w_true, const WeightVector & w_proxy, std::span<const EnvironmentSpec> envs,
  double beta, const PlannerConfig & planner, const FeatureSpace & space)
{
  if (w_true.size() != w_proxy.size() || w_true.size() != space.size()) {
    throw DimensionError("designer_log_potential: dimension mismatch");
  }
  if (beta == 0.0) return 0.0;
  return beta * w_true.values.dot(planned_feature_sum(w_proxy, envs, planner, space));
}

DesignEvidence make_evidence(
  const WeightVector & w_proxy, std::span<const EnvironmentSpec> envs, const NormalizerSet & normalizer,
  double beta, const PlannerConfig & planner, const FeatureSpace & space,
  std::span<const Eigen::MatrixXd> normalizer_features)
{
  if (normalizer.samples.empty()) throw Error("normalized likelihood: normalizer sample set is empty");
  if (!normalizer_features.empty() && normalizer_features.size() != envs.size()) {
    throw DimensionError("make_evidence: one normalizer feature matrix per environment is required");
  }
  DesignEvidence ev;
  ev.beta = beta;
  ev.proxy_features = planned_feature_sum(w_proxy, envs, planner, space);
  ev.normalizer_features = Eigen::MatrixXd::Zero(
    static_cast<Eigen::Index>(normalizer.samples.size()), static_cast<Eigen::Index>(space.size()));
  for (std::size_t e = 0; e < envs.size(); ++e) {
    if (normalizer_features.empty()) {
      ev.normalizer_features += normalizer.features(envs[e], planner, space);
    } else {
      ev.normalizer_features += normalizer_features[e];
    }
  }
  return ev;
}

double normalized_log_likelihood(const WeightVector & w_true, const DesignEvidence & evidence)
{
  if (evidence.normalizer_features.rows() == 0) {
    throw Error("normalized likelihood: normalizer sample set is empty");
  }
  if (static_cast<Eigen::Index>(w_true.size()) != evidence.proxy_features.size()) {
    throw DimensionError("normalized likelihood: dimension mismatch");
  }
  return evidence.log_likelihood(w_true.values);
}

std::size_t sample_softmax(std::span<const double> log_potentials, Rng & rng)
{
  if (log_potentials.empty()) throw Error("sample_softmax: no candidates");
  const double m = *std::max_element(log_potentials.begin(), log_potentials.end());
  std::vector<double> cdf(log_potentials.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < log_potentials.size(); ++i) cdf[i] = (acc += std::exp(log_potentials[i] - m));
  const double u = std::uniform_real_distribution<double>(0.0, acc)(rng);
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

DesignerDraw draw_designer(
  const WeightVector & w_star, std::span<const EnvironmentSpec> envs, const DesignerModelConfig & cfg,
  const PlannerConfig & planner, std::uint64_t seed, const FeatureSpace & space)
{
  if (envs.empty()) throw Error("simulate_designer: no environments to design against");
  cfg.validate();
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  DesignerDraw draw;
  const auto k = static_cast<std::size_t>(cfg.n_designer_candidates);
  for (std::size_t c = 0; c < k; ++c) {
    Eigen::VectorXd w = w_star.values;
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] += cfg.designer_noise * noise(rng);
    draw.candidates.push_back(WeightVector(w).normalized());
  }
  const double beta = cfg.forward_beta(envs.size());
  draw.log_potentials.assign(k, 0.0);
  if (beta != 0.0) {
    std::vector<WeightVector> ws;
    std::vector<EnvironmentSpec> es;
    for (const auto & c : draw.candidates) {
      for (const auto & e : envs) {
        ws.push_back(c);
        es.push_back(e);
      }
    }
    const auto trajs = plan_batch(ws, es, planner, space);
    for (std::size_t c = 0; c < k; ++c) {
      double r = 0.0;
      for (std::size_t e = 0; e < envs.size(); ++e) r += reward(w_star, trajs[c * envs.size() + e].features);
      draw.log_potentials[c] = beta * r;
    }
  }
  draw.chosen = sample_softmax(draw.log_potentials, rng);
  draw.proxy.weights = draw.candidates[draw.chosen];
  draw.proxy.scope = DesignScope::kJoint;
  for (std::size_t e = 0; e < envs.size(); ++e) draw.proxy.env_indices.push_back(static_cast<int>(e));
  return draw;
}

ProxyObservation simulate_designer(
  const WeightVector & w_star, std::span<const EnvironmentSpec> envs, const DesignerModelConfig & cfg,
  const PlannerConfig & planner, std::uint64_t seed, const FeatureSpace & space)
{
  return draw_designer(w_star, envs, cfg, planner, seed, space).proxy;
}

std::vector<std::size_t> systematic_resample(const Eigen::VectorXd & weights, std::size_t n, double u)
{
  const double total = weights.sum();
  std::vector<std::size_t> idx;
  idx.reserve(n);
  std::size_t j = 0;
  double cum = weights[0] / total;
  const auto m = static_cast<std::size_t>(weights.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = (u + static_cast<double>(i)) / static_cast<double>(n);
    while (pos >= cum && j + 1 < m) {
      ++j;
      cum += weights[static_cast<Eigen::Index>(j)] / total;
    }
    idx.push_back(j);
  }
  return idx;
}

ParticleBelief reweight(const ParticleBelief & belief, const DesignEvidence & evidence)
{
  ParticleBelief out = belief;
  for (Eigen::Index i = 0; i < out.particles.rows(); ++i) {
    out.log_weights[i] += evidence.log_likelihood(out.particles.row(i).transpose());
  }
  const double lse = logsumexp(out.log_weights);
  if (!std::isfinite(lse)) throw DegeneratePosteriorError("degenerate posterior: every particle weight is zero");
  out.log_weights.array() -= lse;
  return out;
}

ParticleBelief apply_evidence(const ParticleBelief & belief, DesignEvidence evidence, const BeliefConfig & cfg)
{
  const ParticleBelief weighted = reweight(belief, evidence);
  const auto gen = static_cast<std::uint64_t>(belief.generation + 1);
  const std::size_t n = belief.size();

  Rng resample_rng(derive_seed(belief.seed, {stream::kResample, gen}));
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(resample_rng);
  const auto idx = systematic_resample(weighted.weights(), n, u);

  ParticleBelief out;
  out.prior = belief.prior;
  out.seed = belief.seed;
  out.generation = belief.generation + 1;
  out.evidence = belief.evidence;
  out.evidence.push_back(std::move(evidence));
  out.particles.resize(belief.particles.rows(), belief.particles.cols());
  for (std::size_t i = 0; i < n; ++i) {
    out.particles.row(static_cast<Eigen::Index>(i)) = belief.particles.row(static_cast<Eigen::Index>(idx[i]));
  }
  out.log_weights = Eigen::VectorXd::Constant(belief.particles.rows(), -std::log(static_cast<double>(n)));

  if (cfg.move_steps > 0) {
    const Eigen::VectorXd mean = out.particles.colwise().mean().transpose();
    const Eigen::VectorXd var =
      (out.particles.rowwise() - mean.transpose()).array().square().colwise().mean().transpose();
    const Eigen::VectorXd span = out.prior.upper - out.prior.lower;
    Eigen::VectorXd scale(span.size());
    for (Eigen::Index d = 0; d < span.size(); ++d) {
      scale[d] = span[d] > 0.0 ? std::max(cfg.move_scale * std::sqrt(var[d]), 1e-3 * span[d]) : 0.0;
    }
    Rng move_rng(derive_seed(belief.seed, {stream::kMove, gen}));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Eigen::Index i = 0; i < out.particles.rows(); ++i) {
      Eigen::VectorXd cur = out.particles.row(i).transpose();
      double lp = out.log_posterior(cur);
      for (int s = 0; s < cfg.move_steps; ++s) {
        Eigen::VectorXd prop = cur;
        for (Eigen::Index d = 0; d < prop.size(); ++d) prop[d] += scale[d] * normal(move_rng);
        const double lp_prop = out.log_posterior(prop);
        const double accept = unif(move_rng);
        if (std::isfinite(lp_prop) && std::log(accept) < lp_prop - lp) {
          cur = prop;
          lp = lp_prop;
        }
      }
      out.particles.row(i) = cur.transpose();
    }
  }
  return out;
}

ParticleBelief update_joint(
  const ParticleBelief & belief, const ProxyObservation & proxy, std::span<const EnvironmentSpec> all_envs,
  const NormalizerSet & normalizer, const DesignerModelConfig & model, const BeliefConfig & cfg,
  const PlannerConfig & planner, const FeatureSpace & space)
{
  if (proxy.scope != DesignScope::kJoint) throw Error("update_joint: proxy scope must be joint");
  if (all_envs.empty()) throw Error("update_joint: no environments");
  auto evidence = make_evidence(proxy.weights, all_envs, normalizer, model.beta_inverse, planner, space);
  return apply_evidence(belief, std::move(evidence), cfg);
}

ParticleBelief update_independent(
  const ParticleBelief & belief, const ProxyObservation & proxy, const EnvironmentSpec & new_env,
  const NormalizerSet & normalizer, const DesignerModelConfig & model, const BeliefConfig & cfg,
  const PlannerConfig & planner, const FeatureSpace & space)
{
  if (proxy.scope != DesignScope::kIndependent) throw Error("update_independent: proxy scope must be independent");
  auto evidence =
    make_evidence(proxy.weights, std::span(&new_env, 1), normalizer, model.beta_inverse, planner, space);
  return apply_evidence(belief, std::move(evidence), cfg);
}

double gaussian_entropy(const Eigen::MatrixXd & samples, const Eigen::VectorXd & weights, double ridge)
{
  const Eigen::Index d = samples.cols();
  const Eigen::VectorXd w = weights / weights.sum();
  const Eigen::VectorXd mean = samples.transpose() * w;
  const Eigen::MatrixXd centered = samples.rowwise() - mean.transpose();
  Eigen::MatrixXd cov = centered.transpose() * w.asDiagonal() * centered;
  cov.diagonal().array() += ridge;
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw Error("entropy: covariance is not positive definite");
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return 0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi * std::numbers::e) + logdet);
}

double entropy(const ParticleBelief & belief)
{
  if (belief.size() < belief.dim() + 2) {
    throw Error("entropy: need at least dim + 2 particles");
  }
  return gaussian_entropy(belief.particles, belief.weights());
}

std::vector<DesignEvidence> augment_evidence(
  std::span<const ObservedDesign> designs, std::span<const EnvironmentSpec> envs, const BoxPrior & prior,
  const FeatureSpace & space, const McmcConfig & mcmc, const PlannerConfig & planner)
{
  if (prior.dim() != space.size()) throw DimensionError("augment_posterior: prior dimension != feature dimension");
  if (mcmc.n_normalizer_samples < 1) throw ConfigError("augment_posterior: n_normalizer_samples must be >= 1");
  NormalizerSet normalizer;
  Rng rng(derive_seed(mcmc.seed, {stream::kNormalizer}));
  for (int j = 0; j < mcmc.n_normalizer_samples; ++j) normalizer.samples.push_back(WeightVector(prior.sample(rng)));

  std::vector<std::optional<Eigen::MatrixXd>> per_env(envs.size());
  std::vector<DesignEvidence> out;
  for (const auto & design : designs) {
    if (design.trajectories.size() != design.proxy.env_indices.size()) {
      throw DimensionError("augment_posterior: one stored trajectory per design environment is required");
    }
    DesignEvidence ev;
    ev.beta = mcmc.beta;
    ev.proxy_features = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
    ev.normalizer_features = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(normalizer.samples.size()), static_cast<Eigen::Index>(space.size()));
    for (std::size_t k = 0; k < design.trajectories.size(); ++k) {
      const auto e = static_cast<std::size_t>(design.proxy.env_indices[k]);
      if (e >= envs.size()) throw DimensionError("augment_posterior: environment index out of range");
      ev.proxy_features += compute_features(design.trajectories[k], envs[e], space).values;
      if (!per_env[e]) per_env[e] = normalizer.features(envs[e], planner, space);
      ev.normalizer_features += *per_env[e];
    }
    out.push_back(std::move(ev));
  }
  return out;
}

ParticleBelief sample_posterior_mcmc(const BoxPrior & prior, std::vector<DesignEvidence> evidence, const McmcConfig & mcmc)
{
  if (mcmc.n_samples < 1 || mcmc.thin < 1 || mcmc.burn_in < 0 || mcmc.adapt_interval < 1) {
    throw ConfigError("mcmc: invalid chain lengths");
  }
  ParticleBelief out;
  out.prior = prior;
  out.seed = mcmc.seed;
  out.evidence = std::move(evidence);
  out.generation = static_cast<int>(out.evidence.size());

  Rng rng(derive_seed(mcmc.seed, {stream::kMove}));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::VectorXd cur = mcmc.initial_point ? *mcmc.initial_point : prior.sample(rng);
  double lp = out.log_posterior(cur);
  if (!std::isfinite(lp)) throw Error("mcmc: initial point has zero posterior density");
  const Eigen::VectorXd half_span = 0.5 * (prior.upper - prior.lower);
  // Per-dimension reference scale: the half-span until burn-in statistics are available,
  // then the chain's own spread, so sharp and flat dimensions each get a sensible step.
  Eigen::VectorXd ref = half_span;
  double mult = mcmc.initial_scale;

  auto step = [&]() {
    Eigen::VectorXd prop = cur;
    for (Eigen::Index d = 0; d < prop.size(); ++d) prop[d] += mult * ref[d] * normal(rng);
    const double lp_prop = out.log_posterior(prop);
    if (std::isfinite(lp_prop) && std::log(unif(rng)) < lp_prop - lp) {
      cur = prop;
      lp = lp_prop;
      return true;
    }
    return false;
  };

  const int stats_from = mcmc.burn_in / 4;
  Eigen::VectorXd run_mean = Eigen::VectorXd::Zero(cur.size());
  Eigen::VectorXd run_m2 = Eigen::VectorXd::Zero(cur.size());
  long run_n = 0;
  int window_accepts = 0;
  for (int it = 1; it <= mcmc.burn_in; ++it) {
    window_accepts += step() ? 1 : 0;
    if (it > stats_from) {
      ++run_n;
      const Eigen::VectorXd delta = cur - run_mean;
      run_mean += delta / static_cast<double>(run_n);
      run_m2 += delta.cwiseProduct(cur - run_mean);
    }
    if (it % mcmc.adapt_interval == 0) {
      const double rate = static_cast<double>(window_accepts) / mcmc.adapt_interval;
      mult *= std::exp(2.0 * (rate - mcmc.target_acceptance));
      window_accepts = 0;
      if (run_n >= 2L * mcmc.adapt_interval) {
        for (Eigen::Index d = 0; d < ref.size(); ++d) {
          const double sd = std::sqrt(run_m2[d] / static_cast<double>(run_n - 1));
          ref[d] = half_span[d] > 0.0 ? std::max(sd, 1e-3 * half_span[d]) : 0.0;
        }
      }
    }
  }

  out.particles.resize(mcmc.n_samples, static_cast<Eigen::Index>(prior.dim()));
  long accepts = 0;
  for (int s = 0; s < mcmc.n_samples; ++s) {
    for (int t = 0; t < mcmc.thin; ++t) accepts += step() ? 1 : 0;
    out.particles.row(s) = cur.transpose();
  }
  const double rate = static_cast<double>(accepts) / (static_cast<double>(mcmc.n_samples) * mcmc.thin);
  if (rate < 0.01) {
    throw Error(
      "mcmc: acceptance rate " + std::to_string(rate) +
      " is below 1% after adaptation; reduce initial_scale or lengthen burn_in");
  }
  out.log_weights = Eigen::VectorXd::Constant(mcmc.n_samples, -std::log(static_cast<double>(mcmc.n_samples)));
  return out;
}

ParticleBelief augment_posterior(
  std::span<const ObservedDesign> designs, std::span<const EnvironmentSpec> envs, const BoxPrior & prior,
  const FeatureSpace & space, const McmcConfig & mcmc, const PlannerConfig & planner)
{
  return sample_posterior_mcmc(prior, augment_evidence(designs, envs, prior, space, mcmc, planner), mcmc);
}

}  // namespace ard
