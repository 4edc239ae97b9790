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

#include "ard/planner.hpp"

#include "ard/error.hpp"
#include "ard/parallel.hpp"
#include "ard/rng.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace ard
{

std::size_t worker_count()
{
  static const std::size_t count = [] {
    if (const char * env = std::getenv("ARD_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<std::size_t>(hw == 0 ? 1 : hw);
  }();
  return count;
}

void PlannerConfig::validate() const
{
  if (horizon < 1) throw ConfigError("planner: horizon must be >= 1");
  if (replan_every < 1 || replan_every > horizon) {
    throw ConfigError("planner: require 1 <= replan_every <= horizon");
  }
  if (opt_steps < 1) throw ConfigError("planner: opt_steps must be >= 1");
  if (restarts < 1) throw ConfigError("planner: restarts must be >= 1");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw ConfigError("planner: step_size must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("planner: Adam decay rates must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("planner: epsilon must be positive");
  if (!(init_range >= 0.0)) throw ConfigError("planner: init_range must be non-negative");
}

namespace
{

constexpr double kTieTolerance = 1e-9;

struct RestartOutcome
{
  std::vector<Control> controls;
  double objective{-std::numeric_limits<double>::infinity()};
  bool finite{false};
};

RestartOutcome run_adam(
  const Eigen::VectorXd & w, const CarState & start, int start_step, std::vector<Control> u,
  const EnvironmentSpec & env, const PlannerConfig & cfg, const FeatureSpace & space)
{
  const std::size_t n = u.size();
  std::vector<Control> grad(n), m(n), v(n);
  RestartOutcome best;
  double b1t = 1.0, b2t = 1.0;
  for (int it = 0; it <= cfg.opt_steps; ++it) {
    const double j = reward_and_gradient(w, start, u, env, space, start_step, grad);
    if (!std::isfinite(j)) {
      best.finite = false;
      return best;
    }
    if (!best.finite || j > best.objective) {
      best.objective = j;
      best.controls = u;
      best.finite = true;
    }
    if (it == cfg.opt_steps) break;
    b1t *= cfg.beta1;
    b2t *= cfg.beta2;
    const double c1 = 1.0 / (1.0 - b1t);
    const double c2 = 1.0 / (1.0 - b2t);
    for (std::size_t t = 0; t < n; ++t) {
      m[t].steer = cfg.beta1 * m[t].steer + (1.0 - cfg.beta1) * grad[t].steer;
      m[t].acc = cfg.beta1 * m[t].acc + (1.0 - cfg.beta1) * grad[t].acc;
      v[t].steer = cfg.beta2 * v[t].steer + (1.0 - cfg.beta2) * grad[t].steer * grad[t].steer;
      v[t].acc = cfg.beta2 * v[t].acc + (1.0 - cfg.beta2) * grad[t].acc * grad[t].acc;
      u[t].steer += cfg.step_size * (m[t].steer * c1) / (std::sqrt(v[t].steer * c2) + cfg.epsilon);
      u[t].acc += cfg.step_size * (m[t].acc * c1) / (std::sqrt(v[t].acc * c2) + cfg.epsilon);
    }
  }
  return best;
}

Trajectory plan_signed(
  const WeightVector & w, const EnvironmentSpec & env, const PlannerConfig & cfg,
  const FeatureSpace & space, double sign)
{
  cfg.validate();
  if (w.size() != space.size()) {
    throw DimensionError(
      "plan: weight dimension " + std::to_string(w.size()) + " does not match feature dimension " +
      std::to_string(space.size()));
  }
  // The argmax is invariant to positive scaling, so optimize the unit direction.
  const Eigen::VectorXd objective = sign * w.normalized().values;

  std::vector<Control> executed;
  executed.reserve(static_cast<std::size_t>(cfg.horizon));
  CarState state = env.ego_init;
  std::vector<Control> previous;
  int segment = 0;
  while (static_cast<int>(executed.size()) < cfg.horizon) {
    const int step = static_cast<int>(executed.size());
    std::vector<Control> warm;
    if (!previous.empty()) {
      // Shift the previous plan by the executed amount, pad with zeros.
      const std::size_t shift = static_cast<std::size_t>(cfg.replan_every);
      warm.assign(static_cast<std::size_t>(cfg.horizon), Control{});
      for (std::size_t t = shift; t < previous.size(); ++t) warm[t - shift] = previous[t];
    }
    PlannerConfig seg_cfg = cfg;
    seg_cfg.seed = derive_seed(cfg.seed, {stream::kPlannerInit, static_cast<std::uint64_t>(segment)});
    SegmentPlan seg = optimize_segment(objective, state, step, cfg.horizon, env, seg_cfg, space, warm);
    const int take = std::min(cfg.replan_every, cfg.horizon - step);
    for (int t = 0; t < take; ++t) {
      executed.push_back(seg.controls[static_cast<std::size_t>(t)]);
      state = dynamics_step(state, seg.controls[static_cast<std::size_t>(t)], env.physics);
    }
    previous = std::move(seg.controls);
    ++segment;
  }

  Trajectory traj = rollout(env.ego_init, executed, env, space);
  // Receding-horizon execution can under-perform doing nothing; never return worse.
  Trajectory zero = zero_control_rollout(env, cfg, space);
  const double r_exec = objective.dot(traj.features.values);
  const double r_zero = objective.dot(zero.features.values);
  if (!std::isfinite(r_exec) && !std::isfinite(r_zero)) {
    throw PlanningError("plan: reward is non-finite");
  }
  if (!std::isfinite(r_exec) || r_zero > r_exec + kTieTolerance) return zero;
  return traj;
}

}  // namespace

SegmentPlan optimize_segment(
  const Eigen::VectorXd & objective_weights, const CarState & start, int start_step, int length,
  const EnvironmentSpec & env, const PlannerConfig & cfg, const FeatureSpace & space,
  std::span<const Control> warm_start)
{
  const std::size_t n = static_cast<std::size_t>(length);
  std::vector<std::vector<Control>> inits;
  inits.emplace_back(n, Control{});
  if (!warm_start.empty()) {
    std::vector<Control> warm(n, Control{});
    for (std::size_t t = 0; t < std::min(n, warm_start.size()); ++t) warm[t] = warm_start[t];
    inits.push_back(std::move(warm));
  }
  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> unif(-cfg.init_range, cfg.init_range);
  for (int r = 1; r < cfg.restarts; ++r) {
    std::vector<Control> u(n);
    for (auto & c : u) {
      c.steer = unif(rng);
      c.acc = unif(rng);
    }
    inits.push_back(std::move(u));
  }

  std::vector<RestartOutcome> outcomes;
  outcomes.reserve(inits.size());
  for (auto & init : inits) {
    outcomes.push_back(run_adam(objective_weights, start, start_step, std::move(init), env, cfg, space));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto & o : outcomes) {
    if (o.finite && o.objective > best) best = o.objective;
  }
  if (!std::isfinite(best)) {
    throw PlanningError("plan: every restart produced a non-finite reward");
  }
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].finite && outcomes[i].objective >= best - kTieTolerance) {
      return SegmentPlan{std::move(outcomes[i].controls), outcomes[i].objective, static_cast<int>(i)};
    }
  }
  throw PlanningError("plan: no restart selected");
}

Trajectory plan(
  const WeightVector & w, const EnvironmentSpec & env, const PlannerConfig & cfg, const FeatureSpace & space)
{
  return plan_signed(w, env, cfg, space, 1.0);
}

Trajectory plan_worst_case(
  const WeightVector & w, const EnvironmentSpec & env, const PlannerConfig & cfg, const FeatureSpace & space)
{
  return plan_signed(w, env, cfg, space, -1.0);
}

std::vector<Trajectory> plan_batch(
  std::span<const WeightVector> ws, std::span<const EnvironmentSpec> envs, const PlannerConfig & cfg,
  const FeatureSpace & space, bool worst_case)
{
  if (ws.size() != envs.size()) {
    throw DimensionError("plan_batch: weight and environment lists differ in length");
  }
  std::vector<Trajectory> out(ws.size());
  parallel_for(ws.size(), [&](std::size_t i) {
    try {
      out[i] = worst_case ? plan_worst_case(ws[i], envs[i], cfg, space) : plan(ws[i], envs[i], cfg, space);
    } catch (const BatchPlanningError &) {
      throw;
    } catch (const std::exception & e) {
      throw BatchPlanningError(i, e.what());
    }
  });
  return out;
}

Trajectory zero_control_rollout(const EnvironmentSpec & env, const PlannerConfig & cfg, const FeatureSpace & space)
{
  const std::vector<Control> zeros(static_cast<std::size_t>(cfg.horizon), Control{});
  return rollout(env.ego_init, zeros, env, space);
}

}  // namespace ard
