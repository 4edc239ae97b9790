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

#ifndef ARD__ERROR_HPP_
#define ARD__ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ard
{

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (maps to CLI exit code 1).
class ConfigError : public Error
{
public:
  using Error::Error;
};

class DimensionError : public Error
{
public:
  using Error::Error;
};

class PlanningError : public Error
{
public:
  using Error::Error;
};

/// Raised by plan_batch; carries the index of the failing element.
class BatchPlanningError : public PlanningError
{
public:
  BatchPlanningError(std::size_t index, const std::string & what)
  : PlanningError("batch element " + std::to_string(index) + ": " + what), index_(index)
  {
  }
  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

class SamplingError : public Error
{
public:
  using Error::Error;
};

class DegeneratePosteriorError : public Error
{
public:
  using Error::Error;
};

class EvaluationError : public Error
{
public:
  using Error::Error;
};

/// Operation not allowed in the session's current state.
class StateError : public Error
{
public:
  using Error::Error;
};

}  // namespace ard

#endif  // ARD__ERROR_HPP_
