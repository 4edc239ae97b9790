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

#include "ard/acquisition.hpp"

#include "ard/error.hpp"
#include "ard/parallel.hpp"
#include "ard/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ard
{

std::string_view to_string(AcquisitionMethod m)
{
  switch (m) {
    case AcquisitionMethod::kMaxInfo:
      return "max_info";
    case AcquisitionMethod::kDifficulty:
      return "difficulty";
    case AcquisitionMethod::kRandom:
      return "random";
  }
  return "unknown";
}

AcquisitionMethod parse_acquisition_method(std::string_view name)
{
  if (name == "max_info") return AcquisitionMethod::kMaxInfo;
  if (name == "difficulty") return AcquisitionMethod::kDifficulty;
  if (name == "random") return AcquisitionMethod::kRandom;
  throw ConfigError("unknown acquisition method '" + std::string(name) + "'");
}

void AcquisitionConfig::validate() const
{
  if (n_candidates < 1) throw ConfigError("acquisition: n_candidates must be >= 1");
  if (n_inner < 1) throw ConfigError("acquisition: n_inner must be >= 1");
}

namespace
{

void check_context(const AcquisitionContext & ctx)
{
  if (ctx.belief == nullptr || ctx.normalizer == nullptr || ctx.space == nullptr) {
    throw Error("acquisition: context is missing the belief, normalizer or feature space");
  }
  if (ctx.normalizer->samples.empty()) throw Error("acquisition: normalizer sample set is empty");
}

}  // namespace

InfoGainEstimator::InfoGainEstimator(const AcquisitionContext & ctx, int n_inner, std::uint64_t seed)
: ctx_(ctx)
{
  check_context(ctx_);
  if (n_inner < 1) throw ConfigError("acquisition: n_inner must be >= 1");
  h_current_ = entropy(*ctx_.belief);
  inner_ = draw_normalizer(*ctx_.belief, static_cast<std::size_t>(n_inner), derive_seed(seed, {stream::kInner})).samples;

  if (ctx_.scope == DesignScope::kJoint && !ctx_.history.empty()) {
    const auto & space = *ctx_.space;
    std::vector<WeightVector> ws;
    std::vector<EnvironmentSpec> es;
    for (const auto & w : inner_) {
      for (const auto & e : ctx_.history) {
        ws.push_back(w);
        es.push_back(e);
      }
    }
    const auto trajs = plan_batch(ws, es, ctx_.planner, space);
    const std::size_t h = ctx_.history.size();
    for (std::size_t j = 0; j < inner_.size(); ++j) {
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
      for (std::size_t e = 0; e < h; ++e) sum += trajs[j * h + e].features.values;
      inner_history_features_.push_back(std::move(sum));
    }
    history_normalizer_sum_ = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(ctx_.normalizer->samples.size()), static_cast<Eigen::Index>(space.size()));
    if (!ctx_.history_normalizer_features.empty()) {
      if (ctx_.history_normalizer_features.size() != h) {
        throw DimensionError("acquisition: one normalizer feature matrix per history environment is required");
      }
      for (const auto & m : ctx_.history_normalizer_features) history_normalizer_sum_ += m;
    } else {
      for (const auto & e : ctx_.history) history_normalizer_sum_ += ctx_.normalizer->features(e, ctx_.planner, space);
    }
  }
}

double InfoGainEstimator::operator()(const EnvironmentSpec & candidate) const
{
  const auto & space = *ctx_.space;
  const bool joint = ctx_.scope == DesignScope::kJoint && !ctx_.history.empty();
  const Eigen::MatrixXd cand_norm = ctx_.normalizer->features(candidate, ctx_.planner, space);

  std::vector<EnvironmentSpec> es(inner_.size(), candidate);
  const auto trajs = plan_batch(inner_, es, ctx_.planner, space);

  double h_sum = 0.0;
  std::size_t kept = 0;
  for (std::size_t j = 0; j < inner_.size(); ++j) {
    DesignEvidence ev;
    ev.beta = ctx_.model.beta_inverse;
    ev.proxy_features = trajs[j].features.values;
    ev.normalizer_features = cand_norm;
    if (joint) {
      ev.proxy_features += inner_history_features_[j];
      ev.normalizer_features += history_normalizer_sum_;
    }
    try {
      const ParticleBelief post = reweight(*ctx_.belief, ev);
      h_sum += gaussian_entropy(post.particles, post.weights());
      ++kept;
    } catch (const DegeneratePosteriorError &) {
      // dropped inner sample
    }
  }
  if (kept == 0) throw DegeneratePosteriorError("info_gain: every inner sample produced a degenerate posterior");
  return h_current_ - h_sum / static_cast<double>(kept);
}

double info_gain(const EnvironmentSpec & candidate, const AcquisitionContext & ctx, int n_inner, std::uint64_t seed)
{
  return InfoGainEstimator(ctx, n_inner, seed)(candidate);
}

AcquisitionResult propose_next(
  std::span<const EnvironmentSpec> candidates, const AcquisitionContext & ctx, AcquisitionMethod method,
  const AcquisitionConfig & cfg, std::uint64_t seed)
{
  if (candidates.empty()) throw Error("propose_next: candidate set is empty");
  cfg.validate();
  AcquisitionResult res;
  res.method = method;

  if (method == AcquisitionMethod::kRandom) {
    Rng rng(derive_seed(seed, {stream::kAcquisition}));
    res.index = std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng);
    res.env = candidates[res.index];
    return res;
  }

  res.per_candidate_scores.assign(candidates.size(), 0.0);
  if (method == AcquisitionMethod::kDifficulty) {
    for (std::size_t i = 0; i < candidates.size(); ++i) res.per_candidate_scores[i] = difficulty(candidates[i]);
  } else {
    const InfoGainEstimator estimator(ctx, cfg.n_inner, seed);
    parallel_for(candidates.size(), [&](std::size_t i) { res.per_candidate_scores[i] = estimator(candidates[i]); });
  }
  const auto best = std::max_element(res.per_candidate_scores.begin(), res.per_candidate_scores.end());
  res.index = static_cast<std::size_t>(best - res.per_candidate_scores.begin());
  res.score = *best;
  res.env = candidates[res.index];
  return res;
}

}  // namespace ard
