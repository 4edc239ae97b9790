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

#ifndef ARD__SERIALIZATION_HPP_
#define ARD__SERIALIZATION_HPP_

#include "ard/acquisition.hpp"
#include "ard/belief.hpp"
#include "ard/driving_env.hpp"
#include "ard/environment_space.hpp"
#include "ard/error.hpp"
#include "ard/orchestrator.hpp"
#include "ard/planner.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace ard
{

using nlohmann::json;

/// Bad weight object: unknown or missing key, non-numeric or non-finite value.
class WeightFormatError : public Error
{
public:
  using Error::Error;
};

/// Top-level experiment configuration: the session settings plus the suite grid.
struct ExperimentConfig
{
  SessionConfig session{};
  SuiteConfig suite{};
};

json encode(const CarState & s);
json encode(const Control & c);
json encode(const PhysicsConfig & p);
json encode(const EnvironmentSpec & env);
json encode(const ViolationReport & v);
json encode(const PlannerConfig & p);
json encode(const EnvironmentDistribution & d);
json encode(const DesignerModelConfig & m);
json encode(const BeliefConfig & b);
json encode(const AcquisitionConfig & a);
json encode(const EvaluationConfig & e);
json encode(const SessionConfig & s);
json encode(const ExperimentConfig & c);
json encode(const ParticleBelief & b);
json encode(const ProxyObservation & p, const FeatureSpace & space = FeatureSpace::base());
json encode(const AcquisitionResult & a);
json encode(const RegretStats & r);
json encode(const IterationEntry & e);
json encode(const FinalEvaluation & f);
json encode(const SessionRecord & r);

/// Weights as an object keyed by feature name.
json encode_weights(const WeightVector & w, const FeatureSpace & space = FeatureSpace::base());
json encode_features(const FeatureVector & f, const FeatureSpace & space = FeatureSpace::base());
/// States, controls, summed features and the reward under `w`.
json encode_trajectory(const Trajectory & t, const WeightVector & w, const FeatureSpace & space = FeatureSpace::base());
/// Per-timestep positions of every entity, for playback.
json encode_frames(const Trajectory & t, const EnvironmentSpec & env);

/// Strict: every feature key must be present, no others, all values finite numbers.
WeightVector decode_weights(const json & j, const FeatureSpace & space = FeatureSpace::base());

CarState decode_car_state(const json & j);
PhysicsConfig decode_physics(const json & j);
EnvironmentSpec decode_environment(const json & j, const PhysicsConfig & default_physics = {});
PlannerConfig decode_planner(const json & j);
EnvironmentDistribution decode_distribution(const json & j, const EnvironmentDistribution & defaults);
ParticleBelief decode_belief(const json & j);
SessionConfig decode_session_config(const json & j);
/// Missing fields take their defaults; unknown keys raise ConfigError.
ExperimentConfig decode_experiment_config(const json & j);
SessionRecord decode_record(const json & j);

std::string dump_record(const SessionRecord & r);
SessionRecord parse_record(std::string_view text);

/// Parses config text (empty means all defaults), applies a JSON merge-patch of overrides.
ExperimentConfig parse_experiment_config(std::string_view text, std::string_view overrides = {});

json suite_to_json(const SuiteResult & result);

std::string read_text_file(const std::filesystem::path & path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_text_atomic(const std::filesystem::path & path, std::string_view text);

}  // namespace ard

#endif  // ARD__SERIALIZATION_HPP_
