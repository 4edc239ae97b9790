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

#ifndef ARD__ACQUISITION_HPP_
#define ARD__ACQUISITION_HPP_

#include "ard/belief.hpp"
#include "ard/driving_env.hpp"
#include "ard/planner.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ard
{

enum class AcquisitionMethod { kMaxInfo, kDifficulty, kRandom };

std::string_view to_string(AcquisitionMethod m);
/// Throws ConfigError for an unknown name.
AcquisitionMethod parse_acquisition_method(std::string_view name);

struct AcquisitionConfig
{
  int n_candidates{64};
  int n_inner{8};  ///< inner expectation samples per candidate

  void validate() const;
  bool operator==(const AcquisitionConfig &) const = default;
};

struct AcquisitionResult
{
  EnvironmentSpec env;
  std::size_t index{0};  ///< position of env in the candidate list
  double score{0.0};
  AcquisitionMethod method{AcquisitionMethod::kRandom};
  std::vector<double> per_candidate_scores;  ///< empty for random
};

/// What the information-gain estimate needs besides the candidate: the current belief,
/// the environments designed so far, and the iteration's shared normalizer set.
struct AcquisitionContext
{
  const ParticleBelief * belief{nullptr};
  std::span<const EnvironmentSpec> history;
  DesignScope scope{DesignScope::kJoint};
  const NormalizerSet * normalizer{nullptr};
  /// Optional per-history-env normalizer feature matrices already planned this iteration.
  std::span<const Eigen::MatrixXd> history_normalizer_features;
  DesignerModelConfig model{};
  PlannerConfig planner{};
  const FeatureSpace * space{&FeatureSpace::base()};
};

/// Scores candidates by one-step expected entropy reduction with the hypothetical proxy
/// set to a sampled true reward. The inner samples are drawn once and shared by every
/// candidate so that scores are comparable; their history-side feature sums are cached.
class InfoGainEstimator
{
public:
  InfoGainEstimator(const AcquisitionContext & ctx, int n_inner, std::uint64_t seed);

  double current_entropy() const { return h_current_; }
  double operator()(const EnvironmentSpec & candidate) const;

private:
  AcquisitionContext ctx_;
  std::vector<WeightVector> inner_;
  std::vector<Eigen::VectorXd> inner_history_features_;  ///< joint mode only
  Eigen::MatrixXd history_normalizer_sum_;                 ///< joint mode only
  double h_current_{0.0};
};

double info_gain(
  const EnvironmentSpec & candidate, const AcquisitionContext & ctx, int n_inner, std::uint64_t seed);

/// Picks the next environment. Ties go to the lowest candidate index.
AcquisitionResult propose_next(
  std::span<const EnvironmentSpec> candidates, const AcquisitionContext & ctx, AcquisitionMethod method,
  const AcquisitionConfig & cfg, std::uint64_t seed);

}  // namespace ard

#endif  // ARD__ACQUISITION_HPP_
