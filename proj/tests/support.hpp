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

#ifndef SUPPORT_HPP_
#define SUPPORT_HPP_

#include "ard/driving_env.hpp"
#include "ard/planner.hpp"

#include <Eigen/Core>

#include <numbers>
#include <random>
#include <vector>

namespace ard::test
{

inline CarState forward_ego(double x = 0.0, double y = 0.0, double v = 1.0)
{
  return CarState{x, y, std::numbers::pi / 2.0, v};
}

inline EnvironmentSpec empty_env(CarState ego = forward_ego())
{
  EnvironmentSpec env;
  env.ego_init = ego;
  return env;
}

inline WeightVector weights(std::initializer_list<double> v)
{
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return WeightVector(out);
}

inline WeightVector random_unit_weights(std::mt19937_64 & rng, std::size_t dim = kNumBaseFeatures)
{
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = n(rng);
  return WeightVector(v.normalized());
}

/// A cheap planner for tests that do not probe optimality.
inline PlannerConfig fast_planner()
{
  PlannerConfig cfg;
  cfg.opt_steps = 40;
  cfg.restarts = 1;
  return cfg;
}

inline std::vector<Control> random_controls(std::mt19937_64 & rng, std::size_t n, double range = 1.0)
{
  std::uniform_real_distribution<double> u(-range, range);
  std::vector<Control> out(n);
  for (auto & c : out) c = Control{u(rng), u(rng)};
  return out;
}

}  // namespace ard::test

#endif  // SUPPORT_HPP_
