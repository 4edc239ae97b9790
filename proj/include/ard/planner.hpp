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

#ifndef ARD__PLANNER_HPP_
#define ARD__PLANNER_HPP_

#include "ard/driving_env.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ard
{

struct PlannerConfig
{
  int horizon{10};         ///< optimization lookahead and total executed steps
  int replan_every{5};     ///< executed controls between re-optimizations
  int opt_steps{200};      ///< Adam iterations per restart
  double step_size{0.05};
  int restarts{3};         ///< restart 0 is all-zeros, the rest are uniform random
  std::uint64_t seed{0};
  double beta1{0.9};
  double beta2{0.999};
  double epsilon{1e-8};
  double init_range{0.5};  ///< random restarts draw controls from [-init_range, init_range]

  void validate() const;
  bool operator==(const PlannerConfig &) const = default;
};

/// Open-loop optimization of one control segment. Exposed for tests and tooling.
struct SegmentPlan
{
  std::vector<Control> controls;
  double objective{0.0};   ///< cumulative reward of the segment under the objective weights
  int restart_index{0};
};

/// Gradient ascent of `objective_weights` over a control sequence of length `length`,
/// starting from `start` at absolute step `start_step`. `warm_start`, when non-empty, is
/// tried as an extra initialization after the zeros restart.
SegmentPlan optimize_segment(
  const Eigen::VectorXd & objective_weights, const CarState & start, int start_step, int length,
  const EnvironmentSpec & env, const PlannerConfig & cfg, const FeatureSpace & space,
  std::span<const Control> warm_start = {});

/// Receding-horizon plan maximizing w^T phi. The returned trajectory covers
/// cfg.horizon executed steps from env.ego_init.
Trajectory plan(
  const WeightVector & w, const EnvironmentSpec & env, const PlannerConfig & cfg,
  const FeatureSpace & space = FeatureSpace::base());

/// Same contract as plan but minimizes the cumulative reward.
Trajectory plan_worst_case(
  const WeightVector & w, const EnvironmentSpec & env, const PlannerConfig & cfg,
  const FeatureSpace & space = FeatureSpace::base());

/// Element i equals plan(ws[i], envs[i], cfg). Errors carry the element index.
std::vector<Trajectory> plan_batch(
  std::span<const WeightVector> ws, std::span<const EnvironmentSpec> envs, const PlannerConfig & cfg,
  const FeatureSpace & space = FeatureSpace::base(), bool worst_case = false);

/// Zero-control rollout over cfg.horizon steps.
Trajectory zero_control_rollout(
  const EnvironmentSpec & env, const PlannerConfig & cfg, const FeatureSpace & space = FeatureSpace::base());

}  // namespace ard

#endif  // ARD__PLANNER_HPP_
