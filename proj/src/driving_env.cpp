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

#include "ard/driving_env.hpp"

#include "ard/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ard
{

void PhysicsConfig::validate() const
{
  auto fail = [](const std::string & msg) { throw ConfigError("physics: " + msg); };
  const double fields[] = {dt, alpha, v_goal, v_min, v_max, u_max_steer, u_max_acc, d_min,
                           d_lane, d_car, d_obs, x_fence_left, x_fence_right, x_goal};
  for (double f : fields) {
    if (!std::isfinite(f)) fail("non-finite field");
  }
  if (dt <= 0.0) fail("dt must be positive");
  if (alpha < 0.0) fail("alpha must be non-negative");
  if (!(v_min < v_goal && v_goal < v_max)) fail("require v_min < v_goal < v_max");
  if (d_min <= 0.0 || d_lane <= 0.0 || d_car <= 0.0 || d_obs <= 0.0) {
    fail("all widths must be positive");
  }
  if (u_max_steer <= 0.0 || u_max_acc <= 0.0) fail("u_max must be positive");
  if (lane_centers.empty()) fail("lane_centers is empty");
  for (double c : lane_centers) {
    if (!(x_fence_left < c && c < x_fence_right)) fail("lane center outside the fences");
  }
  if (!std::is_sorted(lane_centers.begin(), lane_centers.end())) {
    fail("lane_centers must be sorted by x");
  }
}

double PhysicsConfig::wrong_lane_center() const
{
  // Target lane is the one nearest to x_goal.
  std::size_t target = 0;
  for (std::size_t i = 1; i < lane_centers.size(); ++i) {
    if (std::abs(lane_centers[i] - x_goal) < std::abs(lane_centers[target] - x_goal)) target = i;
  }
  if (target > 0) return lane_centers[target - 1];
  if (lane_centers.size() > 1) return lane_centers[1];
  return lane_centers[0];
}

Point2 EnvironmentSpec::car_position(std::size_t i, int step) const
{
  const CarState & c = other_cars[i];
  const double travelled = c.v * physics.dt * static_cast<double>(step);
  return {c.x + travelled * std::cos(c.theta), c.y + travelled * std::sin(c.theta)};
}

void EnvironmentSpec::validate() const
{
  physics.validate();
  const double d2 = physics.d_min * physics.d_min;
  for (std::size_t i = 0; i < other_cars.size(); ++i) {
    const double dx = other_cars[i].x - ego_init.x;
    const double dy = other_cars[i].y - ego_init.y;
    if (dx * dx + dy * dy <= d2) {
      throw ConfigError("environment: other car " + std::to_string(i) + " starts within d_min of ego");
    }
  }
  for (std::size_t j = 0; j < cones.size(); ++j) {
    const double dx = cones[j].x - ego_init.x;
    const double dy = cones[j].y - ego_init.y;
    if (dx * dx + dy * dy <= d2) {
      throw ConfigError("environment: cone " + std::to_string(j) + " starts within d_min of ego");
    }
  }
}

FeatureSpace::FeatureSpace(std::vector<std::shared_ptr<const ExtraFeature>> extras)
: extras_(std::move(extras))
{
}

const FeatureSpace & FeatureSpace::base()
{
  static const FeatureSpace space;
  return space;
}

std::vector<std::string> FeatureSpace::names() const
{
  std::vector<std::string> out(kBaseFeatureNames.begin(), kBaseFeatureNames.end());
  for (const auto & e : extras_) out.push_back(e->name());
  return out;
}

int FeatureSpace::index_of(std::string_view name) const
{
  const auto all = names();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i] == name) return static_cast<int>(i);
  }
  return -1;
}

FeatureSpace FeatureSpace::with(std::shared_ptr<const ExtraFeature> extra) const
{
  auto extras = extras_;
  extras.push_back(std::move(extra));
  return FeatureSpace(std::move(extras));
}

WeightVector WeightVector::basis(Feature f, std::size_t dim)
{
  WeightVector w(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)));
  w.values[static_cast<int>(f)] = 1.0;
  return w;
}

WeightVector WeightVector::normalized() const
{
  const double n = values.norm();
  if (n == 0.0) return *this;
  return WeightVector(values / n);
}

ViolationReport & ViolationReport::operator+=(const ViolationReport & o)
{
  overspeed += o.overspeed;
  underspeed += o.underspeed;
  uncomfortable += o.uncomfortable;
  collision += o.collision;
  crash_object += o.crash_object;
  offtrack += o.offtrack;
  wronglane += o.wronglane;
  return *this;
}

CarState dynamics_step(const CarState & s, const Control & u, const PhysicsConfig & p)
{
  CarState n;
  n.x = s.x + p.dt * s.v * std::cos(s.theta);
  n.y = s.y + p.dt * s.v * std::sin(s.theta);
  n.theta = s.theta + p.dt * u.steer;
  n.v = s.v + p.dt * (u.acc - p.alpha * s.v);
  return n;
}

namespace
{

// Adds the six base features of one step into out[0..5].
void add_base_step_features(
  const CarState & s, const Control & u, const EnvironmentSpec & env, int step, double * out)
{
  const PhysicsConfig & p = env.physics;
  const double dv = s.v - p.v_goal;
  out[0] += -(dv * dv);
  out[1] += -(u.steer * u.steer + u.acc * u.acc);
  const double dl = s.x - p.x_goal;
  out[2] += gaussian_kernel(dl * dl, p.d_lane);
  double car = 0.0;
  for (std::size_t i = 0; i < env.other_cars.size(); ++i) {
    const Point2 c = env.car_position(i, step);
    const double dx = s.x - c.x;
    const double dy = s.y - c.y;
    car += gaussian_kernel(dx * dx + dy * dy, p.d_car);
  }
  out[3] += -car;
  double obs = 0.0;
  for (const auto & c : env.cones) {
    const double dx = s.x - c.x;
    const double dy = s.y - c.y;
    obs += gaussian_kernel(dx * dx + dy * dy, p.d_obs);
  }
  out[4] += -obs;
  out[5] += -std::max(0.0, p.x_fence_left - s.x) - std::max(0.0, s.x - p.x_fence_right);
}

}  // namespace

Trajectory rollout(
  const CarState & init, std::span<const Control> controls, const EnvironmentSpec & env,
  const FeatureSpace & space, int start_step)
{
  Trajectory traj;
  traj.states.reserve(controls.size() + 1);
  traj.states.push_back(init);
  for (const auto & u : controls) {
    traj.states.push_back(dynamics_step(traj.states.back(), u, env.physics));
  }
  traj.controls.assign(controls.begin(), controls.end());
  traj.features = compute_features(traj, env, space, start_step);
  return traj;
}

FeatureVector compute_features(
  const Trajectory & traj, const EnvironmentSpec & env, const FeatureSpace & space, int start_step)
{
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
  const auto & extras = space.extras();
  for (std::size_t t = 0; t < traj.controls.size(); ++t) {
    const CarState & s = traj.states[t + 1];
    const Control & u = traj.controls[t];
    const int step = start_step + static_cast<int>(t) + 1;
    add_base_step_features(s, u, env, step, f.data());
    if (!extras.empty()) {
      const StepView view{s, u, env, step};
      for (std::size_t k = 0; k < extras.size(); ++k) {
        f[kNumBaseFeatures + static_cast<Eigen::Index>(k)] += extras[k]->value(view);
      }
    }
  }
  return FeatureVector(std::move(f));
}

double reward(const WeightVector & w, const FeatureVector & features)
{
  if (w.size() != features.size()) {
    std::ostringstream os;
    os << "reward: weight dimension " << w.size() << " does not match feature dimension "
       << features.size();
    throw DimensionError(os.str());
  }
  return w.values.dot(features.values);
}

double reward_and_gradient(
  const Eigen::VectorXd & w, const CarState & init, std::span<const Control> controls,
  const EnvironmentSpec & env, const FeatureSpace & space, int start_step,
  std::span<Control> gradient)
{
  const PhysicsConfig & p = env.physics;
  const std::size_t n = controls.size();
  const auto & extras = space.extras();
  if (static_cast<std::size_t>(w.size()) != space.size()) {
    throw DimensionError("reward_and_gradient: weight dimension does not match feature space");
  }
  const double w_speed = w[0], w_control = w[1], w_lane = w[2], w_car = w[3], w_obs = w[4],
               w_fence = w[5];

  // Forward pass. states[0] = init.
  thread_local std::vector<CarState> states;
  thread_local std::vector<StepGradient> state_grads;
  states.resize(n + 1);
  state_grads.assign(n + 1, StepGradient{});
  states[0] = init;
  double total = 0.0;
  const double inv_lane = 1.0 / (p.d_lane * p.d_lane);
  const double inv_car = 1.0 / (p.d_car * p.d_car);
  const double inv_obs = 1.0 / (p.d_obs * p.d_obs);

  for (std::size_t t = 0; t < n; ++t) {
    const Control & u = controls[t];
    const CarState & prev = states[t];
    CarState & s = states[t + 1];
    s = dynamics_step(prev, u, p);
    const int step = start_step + static_cast<int>(t) + 1;
    StepGradient & g = state_grads[t + 1];

    const double dv = s.v - p.v_goal;
    total += w_speed * -(dv * dv);
    g.v += w_speed * -2.0 * dv;

    total += w_control * -(u.steer * u.steer + u.acc * u.acc);
    g.steer += w_control * -2.0 * u.steer;
    g.acc += w_control * -2.0 * u.acc;

    const double dl = s.x - p.x_goal;
    const double lane = std::exp(-0.5 * dl * dl * inv_lane);
    total += w_lane * lane;
    g.x += w_lane * lane * -dl * inv_lane;

    for (std::size_t i = 0; i < env.other_cars.size(); ++i) {
      const Point2 c = env.car_position(i, step);
      const double dx = s.x - c.x;
      const double dy = s.y - c.y;
      const double k = std::exp(-0.5 * (dx * dx + dy * dy) * inv_car);
      total += w_car * -k;
      g.x += w_car * k * dx * inv_car;
      g.y += w_car * k * dy * inv_car;
    }
    for (const auto & c : env.cones) {
      const double dx = s.x - c.x;
      const double dy = s.y - c.y;
      const double k = std::exp(-0.5 * (dx * dx + dy * dy) * inv_obs);
      total += w_obs * -k;
      g.x += w_obs * k * dx * inv_obs;
      g.y += w_obs * k * dy * inv_obs;
    }
    if (s.x < p.x_fence_left) {
      total += w_fence * -(p.x_fence_left - s.x);
      g.x += w_fence;
    } else if (s.x > p.x_fence_right) {
      total += w_fence * -(s.x - p.x_fence_right);
      g.x -= w_fence;
    }

    if (!extras.empty()) {
      const StepView view{s, u, env, step};
      for (std::size_t k = 0; k < extras.size(); ++k) {
        const double wk = w[kNumBaseFeatures + static_cast<Eigen::Index>(k)];
        if (wk == 0.0) continue;
        StepGradient eg;
        total += wk * extras[k]->value_and_gradient(view, eg);
        g.x += wk * eg.x;
        g.y += wk * eg.y;
        g.theta += wk * eg.theta;
        g.v += wk * eg.v;
        g.steer += wk * eg.steer;
        g.acc += wk * eg.acc;
      }
    }
  }

  // Reverse pass: lambda holds dJ/d(state t+1).
  double lx = 0.0, ly = 0.0, lth = 0.0, lv = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const StepGradient & g = state_grads[t + 1];
    lx += g.x;
    ly += g.y;
    lth += g.theta;
    lv += g.v;
    gradient[t].steer = g.steer + p.dt * lth;
    gradient[t].acc = g.acc + p.dt * lv;
    const CarState & s = states[t];
    const double c = std::cos(s.theta);
    const double sn = std::sin(s.theta);
    const double new_lth = lth + lx * (-p.dt * s.v * sn) + ly * (p.dt * s.v * c);
    const double new_lv = lv * (1.0 - p.dt * p.alpha) + lx * (p.dt * c) + ly * (p.dt * sn);
    lth = new_lth;
    lv = new_lv;
  }
  return total;
}

ViolationReport count_violations(const Trajectory & traj, const EnvironmentSpec & env, int start_step)
{
  const PhysicsConfig & p = env.physics;
  const double u_max_inf = std::max(std::abs(p.u_max_steer), std::abs(p.u_max_acc));
  const double wrong_lane = p.wrong_lane_center();
  ViolationReport r;
  for (std::size_t t = 0; t < traj.controls.size(); ++t) {
    const CarState & s = traj.states[t + 1];
    const Control & u = traj.controls[t];
    const int step = start_step + static_cast<int>(t) + 1;
    if (s.v > p.v_max) ++r.overspeed;
    if (s.v < p.v_min) ++r.underspeed;
    if (std::max(std::abs(u.steer), std::abs(u.acc)) > u_max_inf) ++r.uncomfortable;
    for (std::size_t i = 0; i < env.other_cars.size(); ++i) {
      const Point2 c = env.car_position(i, step);
      if (std::hypot(s.x - c.x, s.y - c.y) <= p.d_min) ++r.collision;
    }
    for (const auto & c : env.cones) {
      if (std::hypot(s.x - c.x, s.y - c.y) <= p.d_min) ++r.crash_object;
    }
    if (s.x < p.x_fence_left || s.x > p.x_fence_right) ++r.offtrack;
    if (std::abs(s.x - wrong_lane) <= p.d_lane) ++r.wronglane;
  }
  return r;
}

double difficulty(const EnvironmentSpec & env)
{
  double score = 0.0;
  for (const auto & c : env.other_cars) {
    score += 1.0 / std::hypot(c.x - env.ego_init.x, c.y - env.ego_init.y);
  }
  for (const auto & c : env.cones) {
    score += 1.0 / std::hypot(c.x - env.ego_init.x, c.y - env.ego_init.y);
  }
  return score;
}

}  // namespace ard
