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

#include "ard/environment_space.hpp"

#include "ard/error.hpp"
#include "ard/rng.hpp"

#include <cmath>

namespace ard
{

EnvironmentDistribution EnvironmentDistribution::devel()
{
  return EnvironmentDistribution{};
}

EnvironmentDistribution EnvironmentDistribution::deploy()
{
  EnvironmentDistribution d;
  d.car_x = {-0.4, 0.4};
  return d;
}

void EnvironmentDistribution::validate() const
{
  physics.validate();
  if (n_other_cars < 0 || n_cones < 0) throw ConfigError("distribution: negative entity count");
  const std::pair<const char *, Interval> ranges[] = {
    {"car_x_range", car_x}, {"car_y_range", car_y}, {"cone_x_range", cone_x}, {"cone_y_range", cone_y}};
  for (const auto & [name, r] : ranges) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
      throw ConfigError(std::string("distribution: ") + name + " is empty or non-finite");
    }
  }
  if (!(grid_resolution > 0.0)) throw ConfigError("distribution: grid_resolution must be positive");
  if (!std::isfinite(other_car_speed)) throw ConfigError("distribution: other_car_speed non-finite");
}

bool EnvironmentDistribution::in_support(const EnvironmentSpec & env) const
{
  for (const auto & c : env.other_cars) {
    if (!car_x.contains(c.x) || !car_y.contains(c.y)) return false;
  }
  for (const auto & c : env.cones) {
    if (!cone_x.contains(c.x) || !cone_y.contains(c.y)) return false;
  }
  return true;
}

namespace
{

constexpr int kMaxAttempts = 10000;
constexpr double kForwardHeading = 1.5707963267948966;

bool clear_of_ego(double x, double y, const CarState & ego, double d_min)
{
  const double dx = x - ego.x;
  const double dy = y - ego.y;
  return dx * dx + dy * dy > d_min * d_min;
}

}  // namespace

std::vector<EnvironmentSpec> sample_environments(
  const EnvironmentDistribution & dist, std::size_t n, std::uint64_t seed)
{
  dist.validate();
  std::vector<EnvironmentSpec> out;
  out.reserve(n);
  Rng rng(seed);
  auto draw = [&rng](const Interval & r) {
    return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
  };
  for (std::size_t k = 0; k < n; ++k) {
    EnvironmentSpec env;
    env.ego_init = dist.ego_init;
    env.physics = dist.physics;
    int attempts = 0;
    auto place = [&](const Interval & xr, const Interval & yr, const char * name) {
      for (;;) {
        if (++attempts > kMaxAttempts) {
          throw SamplingError(
            std::string("sample_environments: rejection sampling failed after 10000 attempts; ") +
            name + " leaves no room outside d_min of the ego");
        }
        const double x = draw(xr);
        const double y = draw(yr);
        if (clear_of_ego(x, y, env.ego_init, env.physics.d_min)) return Point2{x, y};
      }
    };
    for (int i = 0; i < dist.n_other_cars; ++i) {
      const Point2 p = place(dist.car_x, dist.car_y, "car_x_range/car_y_range");
      env.other_cars.push_back({p.x, p.y, kForwardHeading, dist.other_car_speed});
    }
    for (int j = 0; j < dist.n_cones; ++j) {
      env.cones.push_back(place(dist.cone_x, dist.cone_y, "cone_x_range/cone_y_range"));
    }
    out.push_back(std::move(env));
  }
  return out;
}

std::vector<double> grid_axis(const Interval & range, double resolution)
{
  std::vector<double> axis;
  const auto count = static_cast<std::size_t>(std::floor(range.width() / resolution + 1e-9)) + 1;
  axis.reserve(count);
  for (std::size_t k = 0; k < count; ++k) axis.push_back(range.lo + resolution * static_cast<double>(k));
  return axis;
}

EnvironmentGrid::EnvironmentGrid(EnvironmentDistribution dist, std::optional<std::size_t> limit)
: dist_(std::move(dist)), limit_(limit)
{
  dist_.validate();
  for (int i = 0; i < dist_.n_other_cars; ++i) {
    axes_.push_back(grid_axis(dist_.car_x, dist_.grid_resolution));
    axes_.push_back(grid_axis(dist_.car_y, dist_.grid_resolution));
  }
  for (int j = 0; j < dist_.n_cones; ++j) {
    axes_.push_back(grid_axis(dist_.cone_x, dist_.grid_resolution));
    axes_.push_back(grid_axis(dist_.cone_y, dist_.grid_resolution));
  }
  for (const auto & a : axes_) total_ *= a.size();
}

EnvironmentSpec EnvironmentGrid::build(std::uint64_t index) const
{
  std::vector<double> coords(axes_.size());
  for (std::size_t d = axes_.size(); d-- > 0;) {
    const std::uint64_t len = axes_[d].size();
    coords[d] = axes_[d][index % len];
    index /= len;
  }
  EnvironmentSpec env;
  env.ego_init = dist_.ego_init;
  env.physics = dist_.physics;
  std::size_t d = 0;
  for (int i = 0; i < dist_.n_other_cars; ++i, d += 2) {
    env.other_cars.push_back({coords[d], coords[d + 1], kForwardHeading, dist_.other_car_speed});
  }
  for (int j = 0; j < dist_.n_cones; ++j, d += 2) env.cones.push_back({coords[d], coords[d + 1]});
  return env;
}

bool EnvironmentGrid::admissible(const EnvironmentSpec & env) const
{
  for (const auto & c : env.other_cars) {
    if (!clear_of_ego(c.x, c.y, env.ego_init, env.physics.d_min)) return false;
  }
  for (const auto & c : env.cones) {
    if (!clear_of_ego(c.x, c.y, env.ego_init, env.physics.d_min)) return false;
  }
  return true;
}

EnvironmentGrid::iterator::iterator(const EnvironmentGrid * grid, std::uint64_t index, std::size_t yielded)
: grid_(grid), index_(index), yielded_(yielded)
{
  settle();
}

void EnvironmentGrid::iterator::settle()
{
  if (grid_->limit_ && yielded_ >= *grid_->limit_) {
    index_ = grid_->total_;
    return;
  }
  while (index_ < grid_->total_) {
    current_ = grid_->build(index_);
    if (grid_->admissible(current_)) return;
    ++index_;
  }
}

EnvironmentGrid::iterator & EnvironmentGrid::iterator::operator++()
{
  ++index_;
  ++yielded_;
  settle();
  return *this;
}

EnvironmentGrid::iterator EnvironmentGrid::begin() const { return iterator(this, 0, 0); }

EnvironmentGrid::iterator EnvironmentGrid::end() const
{
  iterator it;
  it.grid_ = this;
  it.index_ = total_;
  return it;
}

EnvironmentGrid enumerate_grid(const EnvironmentDistribution & dist, std::optional<std::size_t> limit)
{
  return EnvironmentGrid(dist, limit);
}

}  // namespace ard
