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

#ifndef ARD__ENVIRONMENT_SPACE_HPP_
#define ARD__ENVIRONMENT_SPACE_HPP_

#include "ard/driving_env.hpp"

#include <cstdint>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

namespace ard
{

struct Interval
{
  double lo{0.0};
  double hi{0.0};

  bool contains(double v) const { return lo <= v && v <= hi; }
  double width() const { return hi - lo; }
  bool operator==(const Interval &) const = default;
};

/// Parametric distribution over initial placements of other cars and cones.
struct EnvironmentDistribution
{
  int n_other_cars{2};
  int n_cones{2};
  Interval car_x{-0.75, 0.75};
  Interval car_y{-1.5, 1.5};
  Interval cone_x{-0.75, 0.75};
  Interval cone_y{0.2, 2.0};
  double other_car_speed{0.8};
  CarState ego_init{0.0, 0.0, 1.5707963267948966, 1.0};
  double grid_resolution{0.25};
  PhysicsConfig physics{};

  static EnvironmentDistribution devel();
  /// Same as devel but with the tighter car_x range.
  static EnvironmentDistribution deploy();

  void validate() const;
  /// True when every entity of `env` lies inside this distribution's ranges.
  bool in_support(const EnvironmentSpec & env) const;

  bool operator==(const EnvironmentDistribution &) const = default;
};

/// Uniform placements, rejection-sampled so that nothing starts within d_min of the ego.
/// Throws SamplingError naming the range after 10,000 failed attempts for one environment.
std::vector<EnvironmentSpec> sample_environments(
  const EnvironmentDistribution & dist, std::size_t n, std::uint64_t seed);

/// Lazy Cartesian grid over entity positions with the same collision filter.
class EnvironmentGrid
{
public:
  class iterator
  {
  public:
    using iterator_category = std::input_iterator_tag;
    using value_type = EnvironmentSpec;
    using difference_type = std::ptrdiff_t;
    using pointer = const EnvironmentSpec *;
    using reference = const EnvironmentSpec &;

    iterator() = default;
    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }
    iterator & operator++();
    iterator operator++(int)
    {
      iterator tmp = *this;
      ++*this;
      return tmp;
    }
    bool operator==(const iterator & o) const { return grid_ == o.grid_ && index_ == o.index_; }

  private:
    friend class EnvironmentGrid;
    iterator(const EnvironmentGrid * grid, std::uint64_t index, std::size_t yielded);
    void settle();

    const EnvironmentGrid * grid_{nullptr};
    std::uint64_t index_{0};
    std::size_t yielded_{0};
    EnvironmentSpec current_{};
  };

  EnvironmentGrid(EnvironmentDistribution dist, std::optional<std::size_t> limit);

  iterator begin() const;
  iterator end() const;

  /// Grid points along every placement dimension, in order car0.x, car0.y, ..., cone0.x, ...
  const std::vector<std::vector<double>> & axes() const { return axes_; }
  /// Size of the unfiltered Cartesian product.
  std::uint64_t unfiltered_size() const { return total_; }

private:
  EnvironmentSpec build(std::uint64_t index) const;
  bool admissible(const EnvironmentSpec & env) const;

  EnvironmentDistribution dist_;
  std::optional<std::size_t> limit_;
  std::vector<std::vector<double>> axes_;
  std::uint64_t total_{1};
};

EnvironmentGrid enumerate_grid(
  const EnvironmentDistribution & dist, std::optional<std::size_t> limit = std::nullopt);

/// Grid points lo, lo + res, ... <= hi along one interval.
std::vector<double> grid_axis(const Interval & range, double resolution);

}  // namespace ard

#endif  // ARD__ENVIRONMENT_SPACE_HPP_
