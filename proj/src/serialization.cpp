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

#include "ard/serialization.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace ard
{

namespace
{

[[noreturn]] void fail(const std::string & where, const std::string & what)
{
  throw ConfigError(where + ": " + what);
}

void read_value(const json & v, const std::string & where, double & out)
{
  if (!v.is_number()) fail(where, "expected a number");
  out = v.get<double>();
  if (!std::isfinite(out)) fail(where, "value must be finite");
}

void read_value(const json & v, const std::string & where, int & out)
{
  if (!v.is_number_integer()) fail(where, "expected an integer");
  out = v.get<int>();
}

void read_value(const json & v, const std::string & where, std::uint64_t & out)
{
  if (!v.is_number_unsigned()) fail(where, "expected a non-negative integer");
  out = v.get<std::uint64_t>();
}

void read_value(const json & v, const std::string & where, bool & out)
{
  if (!v.is_boolean()) fail(where, "expected a boolean");
  out = v.get<bool>();
}

void read_value(const json & v, const std::string & where, std::string & out)
{
  if (!v.is_string()) fail(where, "expected a string");
  out = v.get<std::string>();
}

class Reader
{
public:
  Reader(const json & j, std::string where) : j_(j), where_(std::move(where))
  {
    if (!j_.is_object()) fail(where_, "expected an object");
  }

  const json * find(const std::string & key)
  {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json & require(const std::string & key)
  {
    const json * v = find(key);
    if (v == nullptr) fail(where_, "missing key '" + key + "'");
    return *v;
  }

  template <class T>
  Reader & opt(const std::string & key, T & out)
  {
    if (const json * v = find(key)) read_value(*v, path(key), out);
    return *this;
  }

  template <class T>
  T req(const std::string & key)
  {
    T out{};
    read_value(require(key), path(key), out);
    return out;
  }

  std::string path(const std::string & key) const { return where_ + "." + key; }

  void finish() const
  {
    for (const auto & item : j_.items()) {
      if (!seen_.count(item.key())) fail(where_, "unknown key '" + item.key() + "'");
    }
  }

private:
  const json & j_;
  std::string where_;
  std::set<std::string> seen_;
};

json encode_vector(const Eigen::VectorXd & v)
{
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json encode_matrix(const Eigen::MatrixXd & m)
{
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(std::move(row));
  }
  return a;
}

Eigen::VectorXd decode_vector(const json & j, const std::string & where)
{
  if (!j.is_array()) fail(where, "expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) read_value(j[i], where, v[static_cast<Eigen::Index>(i)]);
  return v;
}

Eigen::MatrixXd decode_matrix(const json & j, const std::string & where)
{
  if (!j.is_array()) fail(where, "expected an array of rows");
  if (j.empty()) return Eigen::MatrixXd(0, 0);
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Eigen::VectorXd row = decode_vector(j[r], where);
    if (static_cast<std::size_t>(row.size()) != cols) fail(where, "ragged matrix");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

template <class T, class F>
std::vector<T> decode_list(const json & j, const std::string & where, F && f)
{
  if (!j.is_array()) fail(where, "expected an array");
  std::vector<T> out;
  for (const auto & e : j) out.push_back(f(e));
  return out;
}

json encode_nullable_double(const std::optional<double> & v)
{
  return v ? json(*v) : json(nullptr);
}

DesignScope decode_scope(const std::string & s)
{
  if (s == "joint") return DesignScope::kJoint;
  if (s == "independent") return DesignScope::kIndependent;
  throw ConfigError("unknown design scope '" + s + "'");
}

SessionStatus decode_status(const std::string & s)
{
  if (s == "awaiting_design") return SessionStatus::kAwaitingDesign;
  if (s == "computing_proposal") return SessionStatus::kComputingProposal;
  if (s == "finished") return SessionStatus::kFinished;
  throw ConfigError("unknown session status '" + s + "'");
}

DesignerKind decode_designer(const std::string & s)
{
  if (s == "simulated") return DesignerKind::kSimulated;
  if (s == "human") return DesignerKind::kHuman;
  throw ConfigError("unknown designer kind '" + s + "'");
}

BetaRule decode_beta_rule(const std::string & s)
{
  if (s == "fixed") return BetaRule::kFixed;
  if (s == "scaled_by_env_count") return BetaRule::kScaledByEnvCount;
  throw ConfigError("unknown beta_forward_rule '" + s + "'");
}

Interval decode_interval(const json & j, const std::string & where)
{
  if (!j.is_array() || j.size() != 2) fail(where, "expected [lo, hi]");
  Interval i;
  read_value(j[0], where, i.lo);
  read_value(j[1], where, i.hi);
  return i;
}

ViolationReport decode_violations(const json & j)
{
  Reader r(j, "violations");
  ViolationReport v;
  r.opt("overspeed", v.overspeed).opt("underspeed", v.underspeed).opt("uncomfortable", v.uncomfortable);
  r.opt("collision", v.collision).opt("crash_object", v.crash_object).opt("offtrack", v.offtrack);
  r.opt("wronglane", v.wronglane);
  r.find("total");
  r.finish();
  return v;
}

ProxyObservation decode_proxy(const json & j)
{
  Reader r(j, "proxy");
  ProxyObservation p;
  try {
    p.weights = decode_weights(r.require("weights"));
  } catch (const WeightFormatError & e) {
    throw ConfigError(std::string("proxy.weights: ") + e.what());
  }
  p.scope = decode_scope(r.req<std::string>("scope"));
  p.env_indices = decode_list<int>(r.require("env_indices"), "proxy.env_indices", [](const json & e) {
    int v = 0;
    read_value(e, "proxy.env_indices", v);
    return v;
  });
  r.finish();
  return p;
}

AcquisitionResult decode_acquisition(const json & j, const PhysicsConfig & physics)
{
  Reader r(j, "acquisition_result");
  AcquisitionResult a;
  a.method = parse_acquisition_method(r.req<std::string>("method"));
  a.index = static_cast<std::size_t>(r.req<std::uint64_t>("index"));
  a.score = r.req<double>("score");
  a.env = decode_environment(r.require("env"), physics);
  a.per_candidate_scores = decode_list<double>(r.require("per_candidate_scores"), "per_candidate_scores",
    [](const json & e) {
      double v = 0;
      read_value(e, "per_candidate_scores", v);
      return v;
    });
  r.finish();
  return a;
}

RegretStats decode_regret(const json & j)
{
  Reader r(j, "regret");
  RegretStats s;
  s.mean = r.req<double>("mean");
  s.p5 = r.req<double>("p5");
  s.p95 = r.req<double>("p95");
  s.n_excluded = r.req<int>("n_excluded");
  s.per_env = decode_list<EnvRegret>(r.require("per_env"), "regret.per_env", [](const json & e) {
    Reader er(e, "regret.per_env");
    EnvRegret x;
    x.r_max = er.req<double>("r_max");
    x.r_min = er.req<double>("r_min");
    x.r_w = er.req<double>("r_w");
    x.relative_regret = er.req<double>("relative_regret");
    x.excluded = er.req<bool>("excluded");
    er.finish();
    return x;
  });
  r.finish();
  return s;
}

FinalEvaluation decode_final(const json & j)
{
  Reader r(j, "final_evaluation");
  FinalEvaluation f;
  const json & reg = r.require("regret");
  if (!reg.is_null()) f.regret = decode_regret(reg);
  f.violations = decode_violations(r.require("violations"));
  f.violations_mean = r.req<double>("violations_mean");
  r.finish();
  return f;
}

IterationEntry decode_entry(const json & j, const PhysicsConfig & physics)
{
  Reader r(j, "entry");
  IterationEntry e;
  e.iteration = r.req<int>("iteration");
  e.proxy = decode_proxy(r.require("proxy"));
  {
    Reader s(r.require("belief_snapshot"), "belief_snapshot");
    e.particles = decode_matrix(s.require("particles"), "belief_snapshot.particles");
    e.log_weights = decode_vector(s.require("log_weights"), "belief_snapshot.log_weights");
    s.finish();
  }
  e.entropy = r.req<double>("entropy");
  try {
    e.posterior_mean = decode_weights(r.require("posterior_mean"));
    e.map_estimate = decode_weights(r.require("map_estimate"));
  } catch (const WeightFormatError & err) {
    throw ConfigError(std::string("entry: ") + err.what());
  }
  const json & reg = r.require("regret");
  if (!reg.is_null()) e.regret = decode_regret(reg);
  e.proxy_violations = decode_violations(r.require("proxy_violations"));
  e.posterior_violations = decode_violations(r.require("posterior_violations"));
  e.acquisition = decode_acquisition(r.require("acquisition"), physics);
  const json & ratio = r.require("regret_ratio");
  if (!ratio.is_null()) {
    double v = 0;
    read_value(ratio, "entry.regret_ratio", v);
    e.regret_ratio = v;
  }
  if (const json * w = r.find("wall_clock_s")) {
    double v = 0;
    read_value(*w, "entry.wall_clock_s", v);
    e.wall_clock_s = v;
  }
  r.finish();
  return e;
}

}  // namespace

// --- encoders ---------------------------------------------------------------------------

json encode(const CarState & s)
{
  return {{"x", s.x}, {"y", s.y}, {"theta", s.theta}, {"v", s.v}};
}

json encode(const Control & c)
{
  return {{"steer", c.steer}, {"acc", c.acc}};
}

json encode(const PhysicsConfig & p)
{
  return {
    {"dt", p.dt}, {"alpha", p.alpha}, {"v_goal", p.v_goal}, {"v_min", p.v_min}, {"v_max", p.v_max},
    {"u_max_steer", p.u_max_steer}, {"u_max_acc", p.u_max_acc}, {"d_min", p.d_min}, {"d_lane", p.d_lane},
    {"d_car", p.d_car}, {"d_obs", p.d_obs}, {"lane_centers", p.lane_centers},
    {"x_fence_left", p.x_fence_left}, {"x_fence_right", p.x_fence_right}, {"x_goal", p.x_goal}};
}

json encode(const EnvironmentSpec & env)
{
  json cars = json::array();
  for (const auto & c : env.other_cars) cars.push_back(encode(c));
  json cones = json::array();
  for (const auto & c : env.cones) cones.push_back(json::array({c.x, c.y}));
  return {{"ego_init", encode(env.ego_init)}, {"other_cars", cars}, {"cones", cones}, {"physics", encode(env.physics)}};
}

json encode(const ViolationReport & v)
{
  return {
    {"overspeed", v.overspeed}, {"underspeed", v.underspeed}, {"uncomfortable", v.uncomfortable},
    {"collision", v.collision}, {"crash_object", v.crash_object}, {"offtrack", v.offtrack},
    {"wronglane", v.wronglane}, {"total", v.total()}};
}

json encode(const PlannerConfig & p)
{
  return {
    {"horizon", p.horizon}, {"replan_every", p.replan_every}, {"opt_steps", p.opt_steps},
    {"step_size", p.step_size}, {"restarts", p.restarts}, {"seed", p.seed}, {"beta1", p.beta1},
    {"beta2", p.beta2}, {"epsilon", p.epsilon}, {"init_range", p.init_range}};
}

json encode(const EnvironmentDistribution & d)
{
  return {
    {"n_other_cars", d.n_other_cars}, {"n_cones", d.n_cones},
    {"car_x_range", json::array({d.car_x.lo, d.car_x.hi})}, {"car_y_range", json::array({d.car_y.lo, d.car_y.hi})},
    {"cone_x_range", json::array({d.cone_x.lo, d.cone_x.hi})}, {"cone_y_range", json::array({d.cone_y.lo, d.cone_y.hi})},
    {"other_car_speed", d.other_car_speed}, {"ego_init", encode(d.ego_init)}, {"grid_resolution", d.grid_resolution}};
}

json encode(const DesignerModelConfig & m)
{
  return {
    {"beta_forward", m.beta_forward}, {"beta_inverse", m.beta_inverse},
    {"beta_forward_rule", m.beta_forward_rule == BetaRule::kFixed ? "fixed" : "scaled_by_env_count"},
    {"n_normalizer_samples", m.n_normalizer_samples}, {"n_designer_candidates", m.n_designer_candidates},
    {"designer_noise", m.designer_noise}};
}

json encode(const BeliefConfig & b)
{
  return {{"n_particles", b.n_particles}, {"move_steps", b.move_steps}, {"move_scale", b.move_scale}};
}

json encode(const AcquisitionConfig & a)
{
  return {{"n_candidates", a.n_candidates}, {"n_inner", a.n_inner}};
}

json encode(const EvaluationConfig & e)
{
  return {
    {"n_eval_envs", e.n_eval_envs}, {"ratio_particles", e.ratio_particles}, {"ratio_envs", e.ratio_envs},
    {"n_probe_envs", e.n_probe_envs}, {"regret_ratio", e.regret_ratio}, {"record_timing", e.record_timing}};
}

json encode(const SessionConfig & s)
{
  json initial = json::array();
  for (const auto & e : s.initial_envs) initial.push_back(encode(e));
  json session = {
    {"mode", to_string(s.mode)}, {"method", to_string(s.method)}, {"iterations", s.iterations},
    {"n_initial_envs", s.n_initial_envs}, {"initial_envs", initial}, {"designer", to_string(s.designer)},
    {"w_star", s.w_star ? encode_weights(*s.w_star) : json(nullptr)}, {"prior_half_width", s.prior_half_width},
    {"master_seed", s.master_seed}};
  return {
    {"physics", encode(s.physics)}, {"planner", encode(s.planner)}, {"devel", encode(s.devel)},
    {"deploy", encode(s.deploy)}, {"designer_model", encode(s.designer_model)}, {"belief", encode(s.belief)},
    {"acquisition", encode(s.acquisition)}, {"evaluation", encode(s.evaluation)}, {"session", session}};
}

json encode(const ExperimentConfig & c)
{
  json j = encode(c.session);
  json methods = json::array();
  for (const auto m : c.suite.methods) methods.push_back(to_string(m));
  j["suite"] = {{"methods", methods}, {"seeds", c.suite.seeds}};
  return j;
}

json encode(const ParticleBelief & b)
{
  json ev = json::array();
  for (const auto & e : b.evidence) {
    ev.push_back({
      {"proxy_features", encode_vector(e.proxy_features)},
      {"normalizer_features", encode_matrix(e.normalizer_features)}, {"beta", e.beta}});
  }
  return {
    {"particles", encode_matrix(b.particles)}, {"log_weights", encode_vector(b.log_weights)},
    {"generation", b.generation}, {"seed", b.seed},
    {"prior", {{"lower", encode_vector(b.prior.lower)}, {"upper", encode_vector(b.prior.upper)}}},
    {"evidence", ev}};
}

json encode(const ProxyObservation & p, const FeatureSpace & space)
{
  return {{"weights", encode_weights(p.weights, space)}, {"scope", to_string(p.scope)}, {"env_indices", p.env_indices}};
}

json encode(const AcquisitionResult & a)
{
  return {
    {"method", to_string(a.method)}, {"index", a.index}, {"score", a.score}, {"env", encode(a.env)},
    {"per_candidate_scores", a.per_candidate_scores}};
}

json encode(const RegretStats & r)
{
  json per = json::array();
  for (const auto & e : r.per_env) {
    per.push_back({
      {"r_max", e.r_max}, {"r_min", e.r_min}, {"r_w", e.r_w}, {"relative_regret", e.relative_regret},
      {"excluded", e.excluded}});
  }
  return {{"mean", r.mean}, {"p5", r.p5}, {"p95", r.p95}, {"n_excluded", r.n_excluded}, {"per_env", per}};
}

json encode(const IterationEntry & e)
{
  json j = {
    {"iteration", e.iteration},
    {"proxy", encode(e.proxy)},
    {"belief_snapshot", {{"particles", encode_matrix(e.particles)}, {"log_weights", encode_vector(e.log_weights)}}},
    {"entropy", e.entropy},
    {"posterior_mean", encode_weights(e.posterior_mean)},
    {"map_estimate", encode_weights(e.map_estimate)},
    {"regret", e.regret ? encode(*e.regret) : json(nullptr)},
    {"proxy_violations", encode(e.proxy_violations)},
    {"posterior_violations", encode(e.posterior_violations)},
    {"acquisition", encode(e.acquisition)},
    {"regret_ratio", encode_nullable_double(e.regret_ratio)}};
  if (e.wall_clock_s) j["wall_clock_s"] = *e.wall_clock_s;
  return j;
}

json encode(const FinalEvaluation & f)
{
  return {
    {"regret", f.regret ? encode(*f.regret) : json(nullptr)}, {"violations", encode(f.violations)},
    {"violations_mean", f.violations_mean}};
}

json encode(const SessionRecord & r)
{
  json envs = json::array();
  for (const auto & e : r.envs) envs.push_back(encode(e));
  json entries = json::array();
  for (const auto & e : r.entries) entries.push_back(encode(e));
  return {
    {"format_version", 1},
    {"session_id", r.session_id},
    {"status", to_string(r.status)},
    {"current_iteration", r.current_iteration()},
    {"config", encode(r.config)},
    {"envs", envs},
    {"pending_env", r.pending_env ? encode(*r.pending_env) : json(nullptr)},
    {"belief", encode(r.belief)},
    {"entries", entries},
    {"final_evaluation", r.final_evaluation ? encode(*r.final_evaluation) : json(nullptr)}};
}

json encode_weights(const WeightVector & w, const FeatureSpace & space)
{
  const auto names = space.names();
  if (names.size() != w.size()) throw DimensionError("encode_weights: dimension mismatch");
  json j = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = w[i];
  return j;
}

json encode_features(const FeatureVector & f, const FeatureSpace & space)
{
  const auto names = space.names();
  if (names.size() != f.size()) throw DimensionError("encode_features: dimension mismatch");
  json j = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = f[i];
  return j;
}

json encode_trajectory(const Trajectory & t, const WeightVector & w, const FeatureSpace & space)
{
  json states = json::array();
  for (const auto & s : t.states) states.push_back(encode(s));
  json controls = json::array();
  for (const auto & c : t.controls) controls.push_back(encode(c));
  return {
    {"states", states}, {"controls", controls}, {"features", encode_features(t.features, space)},
    {"weights", encode_weights(w, space)}, {"reward", reward(w, t.features)}};
}

json encode_frames(const Trajectory & t, const EnvironmentSpec & env)
{
  json frames = json::array();
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    json cars = json::array();
    for (std::size_t i = 0; i < env.other_cars.size(); ++i) {
      const Point2 p = env.car_position(i, static_cast<int>(k));
      cars.push_back(json::array({p.x, p.y}));
    }
    json cones = json::array();
    for (const auto & c : env.cones) cones.push_back(json::array({c.x, c.y}));
    frames.push_back({{"t", k}, {"ego", encode(t.states[k])}, {"cars", cars}, {"cones", cones}});
  }
  return frames;
}

// --- decoders ---------------------------------------------------------------------------

WeightVector decode_weights(const json & j, const FeatureSpace & space)
{
  if (!j.is_object()) throw WeightFormatError("weights must be an object keyed by feature name");
  const auto names = space.names();
  for (const auto & item : j.items()) {
    if (space.index_of(item.key()) < 0) throw WeightFormatError("unknown weight key '" + item.key() + "'");
  }
  WeightVector w(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(names.size())));
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto it = j.find(names[i]);
    if (it == j.end()) throw WeightFormatError("missing weight key '" + names[i] + "'");
    if (!it->is_number()) throw WeightFormatError("weight '" + names[i] + "' is not a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw WeightFormatError("weight '" + names[i] + "' is not finite");
    w[i] = v;
  }
  return w;
}

CarState decode_car_state(const json & j)
{
  Reader r(j, "car_state");
  CarState s;
  s.x = r.req<double>("x");
  s.y = r.req<double>("y");
  s.theta = r.req<double>("theta");
  s.v = r.req<double>("v");
  r.finish();
  return s;
}

PhysicsConfig decode_physics(const json & j)
{
  Reader r(j, "physics");
  PhysicsConfig p;
  r.opt("dt", p.dt).opt("alpha", p.alpha).opt("v_goal", p.v_goal).opt("v_min", p.v_min).opt("v_max", p.v_max);
  r.opt("u_max_steer", p.u_max_steer).opt("u_max_acc", p.u_max_acc).opt("d_min", p.d_min);
  r.opt("d_lane", p.d_lane).opt("d_car", p.d_car).opt("d_obs", p.d_obs);
  if (const json * lc = r.find("lane_centers")) {
    const Eigen::VectorXd v = decode_vector(*lc, "physics.lane_centers");
    p.lane_centers.assign(v.data(), v.data() + v.size());
  }
  r.opt("x_fence_left", p.x_fence_left).opt("x_fence_right", p.x_fence_right).opt("x_goal", p.x_goal);
  r.finish();
  return p;
}

EnvironmentSpec decode_environment(const json & j, const PhysicsConfig & default_physics)
{
  Reader r(j, "environment");
  EnvironmentSpec env;
  env.ego_init = decode_car_state(r.require("ego_init"));
  env.other_cars = decode_list<CarState>(r.require("other_cars"), "environment.other_cars", decode_car_state);
  env.cones = decode_list<Point2>(r.require("cones"), "environment.cones", [](const json & c) {
    if (!c.is_array() || c.size() != 2) fail("environment.cones", "expected [x, y]");
    Point2 p;
    read_value(c[0], "environment.cones", p.x);
    read_value(c[1], "environment.cones", p.y);
    return p;
  });
  const json * ph = r.find("physics");
  env.physics = ph ? decode_physics(*ph) : default_physics;
  r.finish();
  return env;
}

PlannerConfig decode_planner(const json & j)
{
  Reader r(j, "planner");
  PlannerConfig p;
  r.opt("horizon", p.horizon).opt("replan_every", p.replan_every).opt("opt_steps", p.opt_steps);
  r.opt("step_size", p.step_size).opt("restarts", p.restarts).opt("seed", p.seed);
  r.opt("beta1", p.beta1).opt("beta2", p.beta2).opt("epsilon", p.epsilon).opt("init_range", p.init_range);
  r.finish();
  return p;
}

EnvironmentDistribution decode_distribution(const json & j, const EnvironmentDistribution & defaults)
{
  Reader r(j, "distribution");
  EnvironmentDistribution d = defaults;
  r.opt("n_other_cars", d.n_other_cars).opt("n_cones", d.n_cones);
  if (const json * v = r.find("car_x_range")) d.car_x = decode_interval(*v, "distribution.car_x_range");
  if (const json * v = r.find("car_y_range")) d.car_y = decode_interval(*v, "distribution.car_y_range");
  if (const json * v = r.find("cone_x_range")) d.cone_x = decode_interval(*v, "distribution.cone_x_range");
  if (const json * v = r.find("cone_y_range")) d.cone_y = decode_interval(*v, "distribution.cone_y_range");
  r.opt("other_car_speed", d.other_car_speed).opt("grid_resolution", d.grid_resolution);
  if (const json * v = r.find("ego_init")) d.ego_init = decode_car_state(*v);
  r.finish();
  return d;
}

ParticleBelief decode_belief(const json & j)
{
  Reader r(j, "belief");
  ParticleBelief b;
  b.particles = decode_matrix(r.require("particles"), "belief.particles");
  b.log_weights = decode_vector(r.require("log_weights"), "belief.log_weights");
  b.generation = r.req<int>("generation");
  b.seed = r.req<std::uint64_t>("seed");
  {
    Reader pr(r.require("prior"), "belief.prior");
    b.prior.lower = decode_vector(pr.require("lower"), "belief.prior.lower");
    b.prior.upper = decode_vector(pr.require("upper"), "belief.prior.upper");
    pr.finish();
  }
  b.evidence = decode_list<DesignEvidence>(r.require("evidence"), "belief.evidence", [](const json & e) {
    Reader er(e, "belief.evidence");
    DesignEvidence ev;
    ev.proxy_features = decode_vector(er.require("proxy_features"), "evidence.proxy_features");
    ev.normalizer_features = decode_matrix(er.require("normalizer_features"), "evidence.normalizer_features");
    ev.beta = er.req<double>("beta");
    er.finish();
    return ev;
  });
  r.finish();
  if (b.log_weights.size() != b.particles.rows()) fail("belief", "one log weight per particle is required");
  return b;
}

ExperimentConfig decode_experiment_config(const json & j)
{
  Reader top(j, "config");
  ExperimentConfig c;
  SessionConfig & s = c.session;
  if (const json * v = top.find("physics")) s.physics = decode_physics(*v);
  if (const json * v = top.find("planner")) s.planner = decode_planner(*v);
  if (const json * v = top.find("devel")) s.devel = decode_distribution(*v, EnvironmentDistribution::devel());
  if (const json * v = top.find("deploy")) s.deploy = decode_distribution(*v, EnvironmentDistribution::deploy());
  if (const json * v = top.find("designer_model")) {
    Reader r(*v, "designer_model");
    auto & m = s.designer_model;
    r.opt("beta_forward", m.beta_forward).opt("beta_inverse", m.beta_inverse);
    if (const json * rule = r.find("beta_forward_rule")) {
      std::string name;
      read_value(*rule, "designer_model.beta_forward_rule", name);
      m.beta_forward_rule = decode_beta_rule(name);
    }
    r.opt("n_normalizer_samples", m.n_normalizer_samples).opt("n_designer_candidates", m.n_designer_candidates);
    r.opt("designer_noise", m.designer_noise);
    r.finish();
  }
  if (const json * v = top.find("belief")) {
    Reader r(*v, "belief");
    r.opt("n_particles", s.belief.n_particles).opt("move_steps", s.belief.move_steps).opt("move_scale", s.belief.move_scale);
    r.finish();
  }
  if (const json * v = top.find("acquisition")) {
    Reader r(*v, "acquisition");
    r.opt("n_candidates", s.acquisition.n_candidates).opt("n_inner", s.acquisition.n_inner);
    r.finish();
  }
  if (const json * v = top.find("evaluation")) {
    Reader r(*v, "evaluation");
    auto & e = s.evaluation;
    r.opt("n_eval_envs", e.n_eval_envs).opt("ratio_particles", e.ratio_particles).opt("ratio_envs", e.ratio_envs);
    r.opt("n_probe_envs", e.n_probe_envs).opt("regret_ratio", e.regret_ratio).opt("record_timing", e.record_timing);
    r.finish();
  }
  if (const json * v = top.find("session")) {
    Reader r(*v, "session");
    std::string name;
    if (const json * m = r.find("mode")) {
      read_value(*m, "session.mode", name);
      s.mode = decode_scope(name);
    }
    if (const json * m = r.find("method")) {
      read_value(*m, "session.method", name);
      s.method = parse_acquisition_method(name);
    }
    r.opt("iterations", s.iterations).opt("n_initial_envs", s.n_initial_envs);
    if (const json * m = r.find("initial_envs")) {
      s.initial_envs = decode_list<EnvironmentSpec>(*m, "session.initial_envs", [&](const json & e) {
        return decode_environment(e, s.physics);
      });
    }
    if (const json * m = r.find("designer")) {
      read_value(*m, "session.designer", name);
      s.designer = decode_designer(name);
    }
    if (const json * m = r.find("w_star"); m && !m->is_null()) {
      try {
        s.w_star = decode_weights(*m);
      } catch (const WeightFormatError & e) {
        throw ConfigError(std::string("session.w_star: ") + e.what());
      }
    }
    r.opt("prior_half_width", s.prior_half_width).opt("master_seed", s.master_seed);
    r.finish();
  }
  if (const json * v = top.find("suite")) {
    Reader r(*v, "suite");
    if (const json * m = r.find("methods")) {
      c.suite.methods = decode_list<AcquisitionMethod>(*m, "suite.methods", [](const json & e) {
        std::string name;
        read_value(e, "suite.methods", name);
        return parse_acquisition_method(name);
      });
    }
    if (const json * m = r.find("seeds")) {
      c.suite.seeds = decode_list<std::uint64_t>(*m, "suite.seeds", [](const json & e) {
        std::uint64_t v = 0;
        read_value(e, "suite.seeds", v);
        return v;
      });
    }
    r.finish();
  }
  top.finish();
  c.suite.base = c.session;
  return c;
}

SessionConfig decode_session_config(const json & j)
{
  return decode_experiment_config(j).session;
}

SessionRecord decode_record(const json & j)
{
  Reader r(j, "record");
  SessionRecord rec;
  if (r.req<int>("format_version") != 1) fail("record", "unsupported format_version");
  rec.session_id = r.req<std::string>("session_id");
  rec.status = decode_status(r.req<std::string>("status"));
  const int iteration = r.req<int>("current_iteration");
  rec.config = decode_session_config(r.require("config"));
  const PhysicsConfig & ph = rec.config.physics;
  rec.envs = decode_list<EnvironmentSpec>(r.require("envs"), "record.envs", [&](const json & e) {
    return decode_environment(e, ph);
  });
  const json & pend = r.require("pending_env");
  if (!pend.is_null()) rec.pending_env = decode_environment(pend, ph);
  rec.belief = decode_belief(r.require("belief"));
  rec.entries = decode_list<IterationEntry>(r.require("entries"), "record.entries", [&](const json & e) {
    return decode_entry(e, ph);
  });
  const json & fin = r.require("final_evaluation");
  if (!fin.is_null()) rec.final_evaluation = decode_final(fin);
  r.finish();
  if (iteration != rec.current_iteration()) fail("record", "current_iteration does not match the entry count");
  return rec;
}

std::string dump_record(const SessionRecord & r)
{
  return encode(r).dump(1) + "\n";
}

SessionRecord parse_record(std::string_view text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error & e) {
    throw ConfigError(std::string("record is not valid JSON: ") + e.what());
  }
  return decode_record(j);
}

ExperimentConfig parse_experiment_config(std::string_view text, std::string_view overrides)
{
  json j = json::object();
  try {
    if (!text.empty()) j = json::parse(text);
    if (!overrides.empty()) j.merge_patch(json::parse(overrides));
  } catch (const json::parse_error & e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c = decode_experiment_config(j);
  c.session.resolved().validate();
  return c;
}

json suite_to_json(const SuiteResult & result)
{
  json cells = json::array();
  for (const auto & c : result.cells) {
    json cell = {
      {"method", to_string(c.method)}, {"seed", c.seed}, {"session_id", suite_cell_id(c.method, c.seed)},
      {"ok", c.record.has_value()}};
    if (!c.error.empty()) cell["error"] = c.error;
    cells.push_back(std::move(cell));
  }
  auto nullable = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  json rows = json::array();
  for (const auto & r : result.rows()) {
    rows.push_back({
      {"method", to_string(r.method)}, {"seed", r.seed}, {"iteration", r.iteration},
      {"mean_regret", nullable(r.mean_regret)}, {"regret_p5", nullable(r.regret_p5)},
      {"regret_p95", nullable(r.regret_p95)}, {"regret_ratio", nullable(r.regret_ratio)},
      {"entropy", r.entropy}, {"violations_mean", r.violations_mean}});
  }
  return {{"cells", cells}, {"rows", rows}};
}

std::string read_text_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const std::filesystem::path & path, std::string_view text)
{
  const auto dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename into '" + path.string() + "': " + ec.message());
  }
}

}  // namespace ard
