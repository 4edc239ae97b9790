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

#ifndef ARD__DRIVING_ENV_HPP_
#define ARD__DRIVING_ENV_HPP_

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ard
{

/// Ego or other-vehicle state. x is lateral, y longitudinal, theta = 0 points along +x.
struct CarState
{
  double x{0.0};
  double y{0.0};
  double theta{0.0};
  double v{0.0};

  bool operator==(const CarState &) const = default;
};

struct Control
{
  double steer{0.0};  ///< steering rate [rad/s]
  double acc{0.0};    ///< acceleration [units/s^2]

  bool operator==(const Control &) const = default;
};

struct Point2
{
  double x{0.0};
  double y{0.0};

  bool operator==(const Point2 &) const = default;
};

struct PhysicsConfig
{
  double dt{0.1};
  double alpha{0.1};
  double v_goal{1.0};
  double v_min{0.2};
  double v_max{2.0};
  double u_max_steer{2.0};
  double u_max_acc{2.0};
  double d_min{0.15};
  double d_lane{0.15};
  double d_car{0.2};
  double d_obs{0.2};
  std::vector<double> lane_centers{-0.5, 0.0, 0.5};
  double x_fence_left{-0.75};
  double x_fence_right{0.75};
  double x_goal{-0.5};

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  /// Center of the lane counted as "wrong" while merging into x_goal: the lane to the
  /// left (smaller x) of the target, or the lane to its right when the target is leftmost.
  double wrong_lane_center() const;

  bool operator==(const PhysicsConfig &) const = default;
};

/// One reward-free MDP: initial placements plus the physics it runs under.
struct EnvironmentSpec
{
  CarState ego_init{};
  std::vector<CarState> other_cars;  ///< constant-speed vehicles
  std::vector<Point2> cones;
  PhysicsConfig physics{};

  /// Position of other car i after `step` integration steps.
  Point2 car_position(std::size_t i, int step) const;

  /// Throws ConfigError if physics is invalid or an entity starts within d_min of the ego.
  void validate() const;

  bool operator==(const EnvironmentSpec &) const = default;
};

enum class Feature : int { kSpeed = 0, kControl, kLane, kCar, kObstacle, kFence };
inline constexpr int kNumBaseFeatures = 6;
inline constexpr std::array<std::string_view, kNumBaseFeatures> kBaseFeatureNames = {
  "speed", "control", "lane", "car", "obstacle", "fence"};

/// Per-timestep inputs handed to a feature evaluator.
struct StepView
{
  const CarState & ego;        ///< state after the step
  const Control & control;     ///< control applied during the step
  const EnvironmentSpec & env;
  int step;                    ///< absolute step index of `ego` (1-based)
};

/// Partial derivatives of one scalar with respect to the step's state and control.
struct StepGradient
{
  double x{0.0};
  double y{0.0};
  double theta{0.0};
  double v{0.0};
  double steer{0.0};
  double acc{0.0};
};

/// A designer-added feature beyond the six built-in ones. Must be differentiable so
/// that the planner can optimize rewards that weight it.
class ExtraFeature
{
public:
  virtual ~ExtraFeature() = default;
  virtual std::string name() const = 0;
  virtual double value(const StepView & step) const = 0;
  /// Returns the value and adds d(value)/d(state, control) into `grad`.
  virtual double value_and_gradient(const StepView & step, StepGradient & grad) const = 0;
};

/// The ordered feature set rewards are defined over: the six base features followed
/// by any extra features.
class FeatureSpace
{
public:
  FeatureSpace() = default;
  explicit FeatureSpace(std::vector<std::shared_ptr<const ExtraFeature>> extras);

  static const FeatureSpace & base();

  std::size_t size() const { return kNumBaseFeatures + extras_.size(); }
  std::size_t extra_count() const { return extras_.size(); }
  const std::vector<std::shared_ptr<const ExtraFeature>> & extras() const { return extras_; }
  std::vector<std::string> names() const;
  /// Index of a feature by name, or -1.
  int index_of(std::string_view name) const;
  FeatureSpace with(std::shared_ptr<const ExtraFeature> extra) const;

private:
  std::vector<std::shared_ptr<const ExtraFeature>> extras_;
};

struct FeatureVector
{
  Eigen::VectorXd values = Eigen::VectorXd::Zero(kNumBaseFeatures);

  FeatureVector() = default;
  explicit FeatureVector(Eigen::VectorXd v) : values(std::move(v)) {}

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  double operator[](std::size_t i) const { return values[static_cast<Eigen::Index>(i)]; }
  double & operator[](std::size_t i) { return values[static_cast<Eigen::Index>(i)]; }
  double get(Feature f) const { return values[static_cast<int>(f)]; }
  double speed() const { return get(Feature::kSpeed); }
  double control() const { return get(Feature::kControl); }
  double lane() const { return get(Feature::kLane); }
  double car() const { return get(Feature::kCar); }
  double obstacle() const { return get(Feature::kObstacle); }
  double fence() const { return get(Feature::kFence); }
};

/// Reward parameters; one entry per feature of the active FeatureSpace.
struct WeightVector
{
  Eigen::VectorXd values = Eigen::VectorXd::Zero(kNumBaseFeatures);

  WeightVector() = default;
  explicit WeightVector(Eigen::VectorXd v) : values(std::move(v)) {}
  static WeightVector basis(Feature f, std::size_t dim = kNumBaseFeatures);

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  double operator[](std::size_t i) const { return values[static_cast<Eigen::Index>(i)]; }
  double & operator[](std::size_t i) { return values[static_cast<Eigen::Index>(i)]; }
  /// Unit-L2 copy; the zero vector maps to itself.
  WeightVector normalized() const;
  bool operator==(const WeightVector & o) const { return values == o.values; }
};

struct Trajectory
{
  std::vector<CarState> states;  ///< horizon + 1 entries
  std::vector<Control> controls;  ///< horizon entries
  FeatureVector features;

  std::size_t horizon() const { return controls.size(); }
};

struct ViolationReport
{
  int overspeed{0};
  int underspeed{0};
  int uncomfortable{0};
  int collision{0};
  int crash_object{0};
  int offtrack{0};
  int wronglane{0};

  int total() const
  {
    return overspeed + underspeed + uncomfortable + collision + crash_object + offtrack +
           wronglane;
  }
  ViolationReport & operator+=(const ViolationReport & o);
  bool operator==(const ViolationReport &) const = default;
};

/// Explicit-Euler step of the point-mass model with friction.
CarState dynamics_step(const CarState & state, const Control & control, const PhysicsConfig & physics);

/// Rolls `controls` out from `init`. `start_step` is the absolute step index of `init`,
/// which positions the other cars when the rollout starts mid-episode.
Trajectory rollout(
  const CarState & init, std::span<const Control> controls, const EnvironmentSpec & env,
  const FeatureSpace & space = FeatureSpace::base(), int start_step = 0);

/// Summed per-step features of a trajectory. State features are taken at states[1..H].
FeatureVector compute_features(
  const Trajectory & traj, const EnvironmentSpec & env,
  const FeatureSpace & space = FeatureSpace::base(), int start_step = 0);

/// w^T phi. Throws DimensionError on mismatch.
double reward(const WeightVector & w, const FeatureVector & features);

/// Cumulative reward of the rollout of `controls` and its gradient with respect to every
/// control, by reverse-mode chain rule through the dynamics.
double reward_and_gradient(
  const Eigen::VectorXd & w, const CarState & init, std::span<const Control> controls,
  const EnvironmentSpec & env, const FeatureSpace & space, int start_step,
  std::span<Control> gradient);

ViolationReport count_violations(const Trajectory & traj, const EnvironmentSpec & env, int start_step = 0);

/// Sum of reciprocal initial distances from the ego to every other car and cone.
double difficulty(const EnvironmentSpec & env);

/// Unnormalized Gaussian kernel exp(-|z|^2 / (2 d^2)).
inline double gaussian_kernel(double squared_norm, double width)
{
  return std::exp(-squared_norm / (2.0 * width * width));
}

}  // namespace ard

#endif  // ARD__DRIVING_ENV_HPP_
