#include "nchl/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "nchl/errors.hpp"
#include "nchl/rng.hpp"

namespace nchl {

StepResult Environment::step(std::span<const double> action) {
  if (action.size() != action_dim()) {
    throw DimensionError("action has " + std::to_string(action.size()) +
                         " values, environment expects " + std::to_string(action_dim()));
  }
  if (failed_ || steps_ >= max_steps_) {
    throw std::logic_error("step called on a finished episode");
  }
  clamped_.resize(action.size());
  for (std::size_t i = 0; i < action.size(); ++i) {
    if (!std::isfinite(action[i])) {
      failed_ = true;
      return {observation(), true, true};
    }
    clamped_[i] = std::clamp(action[i], -1.0, 1.0);
  }
  auto obs = advance(clamped_);
  ++steps_;
  return {obs, steps_ >= max_steps_, false};
}

// SegmentCrawler

SegmentCrawler::SegmentCrawler(SegmentCrawlerConstants constants, std::size_t max_steps)
    : Environment(max_steps), c_(constants) {
  if (c_.segments < 2) throw ConfigError("constants.segments", "must be >= 2");
  if (!(c_.dt > 0)) throw ConfigError("constants.dt", "must be > 0");
  if (!(c_.mass > 0)) throw ConfigError("constants.mass", "must be > 0");
  if (!(c_.rest_length > 0)) throw ConfigError("constants.rest_length", "must be > 0");
  if (!(c_.stiffness >= 0)) throw ConfigError("constants.stiffness", "must be >= 0");
  if (!(c_.link_damping >= 0)) throw ConfigError("constants.link_damping", "must be >= 0");
  if (!(c_.drag_forward >= 0)) throw ConfigError("constants.drag_forward", "must be >= 0");
  if (!(c_.drag_backward >= 0)) throw ConfigError("constants.drag_backward", "must be >= 0");
  if (!(c_.actuation >= 0 && c_.actuation < 1)) {
    throw ConfigError("constants.actuation", "must be in [0, 1)");
  }
  if (!(c_.coulomb_forward >= 0)) throw ConfigError("constants.coulomb_forward", "must be >= 0");
  if (!(c_.coulomb_backward >= 0)) {
    throw ConfigError("constants.coulomb_backward", "must be >= 0");
  }
  if (!(c_.anchoring >= 0)) throw ConfigError("constants.anchoring", "must be >= 0");
  if (!(c_.actuator_tau >= 0)) throw ConfigError("constants.actuator_tau", "must be >= 0");
  if (!std::isfinite(c_.origin)) throw ConfigError("constants.origin", "must be finite");
  const std::size_t k = c_.segments;
  disp_.assign(k, 0.0);
  vel_.assign(k, 0.0);
  force_.assign(k, 0.0);
  drive_.assign(k - 1, 0.0);
  obs_.assign(2 * k, 0.0);
}

std::span<const double> SegmentCrawler::reset(std::uint64_t /*seed*/) {
  restart();
  std::fill(disp_.begin(), disp_.end(), 0.0);
  std::fill(vel_.begin(), vel_.end(), 0.0);
  std::fill(drive_.begin(), drive_.end(), 0.0);
  observe();
  return obs_;
}

std::span<const double> SegmentCrawler::advance(std::span<const double> action) {
  const std::size_t k = disp_.size();
  std::fill(force_.begin(), force_.end(), 0.0);
  const double alpha = c_.actuator_tau > 0 ? std::min(1.0, c_.dt / c_.actuator_tau) : 1.0;
  for (std::size_t l = 0; l + 1 < k; ++l) {
    drive_[l] += alpha * (action[l] - drive_[l]);
    const double length = c_.rest_length + (disp_[l + 1] - disp_[l]);
    const double target = c_.rest_length * (1.0 + c_.actuation * drive_[l]);
    const double tension =
        c_.stiffness * (length - target) + c_.link_damping * (vel_[l + 1] - vel_[l]);
    force_[l] += tension;
    force_[l + 1] -= tension;
  }
  for (std::size_t s = 0; s < k; ++s) {
    double grip = 1.0;
    if (c_.anchoring > 0 && c_.actuation > 0) {
      grip += c_.anchoring * std::clamp((1.0 - obs_[2 * s]) / c_.actuation, 0.0, 1.0);
    }
    const double drag = (vel_[s] > 0 ? c_.drag_forward : c_.drag_backward) * grip;
    double v = vel_[s] + c_.dt * (force_[s] - drag * vel_[s]) / c_.mass;
    // Implicit Coulomb step: friction can at most cancel the velocity.
    const double coulomb = v > 0 ? c_.coulomb_forward : c_.coulomb_backward;
    const double stop = c_.dt * coulomb * grip / c_.mass;
    if (std::abs(v) <= stop) v = 0.0;
    else v -= std::copysign(stop, v);
    vel_[s] = v;
    disp_[s] += c_.dt * vel_[s];
  }
  observe();
  return obs_;
}

void SegmentCrawler::observe() {
  const std::size_t k = disp_.size();
  auto ratio = [&](std::size_t l) {
    return (c_.rest_length + (disp_[l + 1] - disp_[l])) / c_.rest_length;
  };
  for (std::size_t s = 0; s < k; ++s) {
    double r;
    if (s == 0) r = ratio(0);
    else if (s + 1 == k) r = ratio(k - 2);
    else r = 0.5 * (ratio(s - 1) + ratio(s));
    obs_[2 * s] = r;
    obs_[2 * s + 1] = vel_[s];
  }
}

double SegmentCrawler::fitness() const {
  double sum = 0.0;
  for (double d : disp_) sum += d;
  return sum / static_cast<double>(disp_.size());
}

std::vector<double> SegmentCrawler::positions() const {
  std::vector<double> p(disp_.size());
  for (std::size_t s = 0; s < p.size(); ++s) {
    p[s] = c_.origin + c_.rest_length * static_cast<double>(s) + disp_[s];
  }
  return p;
}

// PointNavigator

PointNavigator::PointNavigator(PointNavigatorConstants constants, std::size_t max_steps)
    : Environment(max_steps), c_(constants), obs_(4, 0.0) {
  if (!(c_.dt > 0)) throw ConfigError("constants.dt", "must be > 0");
  if (!(c_.mass > 0)) throw ConfigError("constants.mass", "must be > 0");
  if (!(c_.force_gain >= 0)) throw ConfigError("constants.force_gain", "must be >= 0");
  if (!(c_.damping >= kMinNavigatorDamping)) {
    throw ConfigError("constants.damping",
                      "must be >= " + std::to_string(kMinNavigatorDamping));
  }
  if (c_.waypoints < 1) throw ConfigError("constants.waypoints", "must be >= 1");
  if (!(c_.waypoint_min_distance > 0)) {
    throw ConfigError("constants.waypoint_min_distance", "must be > 0");
  }
  if (!(c_.waypoint_max_distance >= c_.waypoint_min_distance)) {
    throw ConfigError("constants.waypoint_max_distance", "must be >= waypoint_min_distance");
  }
  if (!(c_.capture_radius > 0)) throw ConfigError("constants.capture_radius", "must be > 0");
  if (!(c_.sensor_range > 0)) throw ConfigError("constants.sensor_range", "must be > 0");
}

std::span<const double> PointNavigator::reset(std::uint64_t seed) {
  restart();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> heading0(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> turn(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
  std::uniform_real_distribution<double> dist(c_.waypoint_min_distance,
                                              c_.waypoint_max_distance);
  waypoints_.clear();
  completed_length_.assign(1, 0.0);
  double heading = heading0(rng);
  std::array<double, 2> prev{0.0, 0.0};
  for (int w = 0; w < c_.waypoints; ++w) {
    const double d = dist(rng);
    const std::array<double, 2> p{prev[0] + d * std::cos(heading),
                                  prev[1] + d * std::sin(heading)};
    waypoints_.push_back(p);
    completed_length_.push_back(completed_length_.back() + d);
    prev = p;
    heading += turn(rng);
  }
  current_ = 0;
  pos_ = {0.0, 0.0};
  vel_ = {0.0, 0.0};
  observe();
  return obs_;
}

double PointNavigator::distance_to_current() const {
  const auto& w = waypoints_[current_];
  return std::hypot(w[0] - pos_[0], w[1] - pos_[1]);
}

std::span<const double> PointNavigator::advance(std::span<const double> action) {
  for (int d = 0; d < 2; ++d) {
    const double f = c_.force_gain * action[d] - c_.damping * vel_[d];
    vel_[d] += c_.dt * f / c_.mass;
    pos_[d] += c_.dt * vel_[d];
  }
  while (current_ < waypoints_.size() && distance_to_current() <= c_.capture_radius) {
    ++current_;
  }
  observe();
  return obs_;
}

void PointNavigator::observe() {
  double rx = 0.0, ry = 0.0;
  if (current_ < waypoints_.size()) {
    rx = (waypoints_[current_][0] - pos_[0]) / c_.sensor_range;
    ry = (waypoints_[current_][1] - pos_[1]) / c_.sensor_range;
    const double n = std::hypot(rx, ry);
    if (n > 1.0) {
      rx /= n;
      ry /= n;
    }
  }
  obs_[0] = rx;
  obs_[1] = ry;
  obs_[2] = vel_[0];
  obs_[3] = vel_[1];
}

double PointNavigator::fitness() const {
  if (current_ >= waypoints_.size()) return completed_length_.back();
  const double segment = completed_length_[current_ + 1] - completed_length_[current_];
  return completed_length_[current_] + (segment - distance_to_current());
}

// Construction from a run config.

namespace {

template <class Constants>
struct Binding {
  const char* name;
  double Constants::*real = nullptr;
  int Constants::*integer = nullptr;
};

const std::vector<Binding<SegmentCrawlerConstants>>& crawler_bindings() {
  using C = SegmentCrawlerConstants;
  static const std::vector<Binding<C>> b = {
      {"segments", nullptr, &C::segments},   {"dt", &C::dt},
      {"mass", &C::mass},                    {"rest_length", &C::rest_length},
      {"stiffness", &C::stiffness},          {"link_damping", &C::link_damping},
      {"drag_forward", &C::drag_forward},    {"drag_backward", &C::drag_backward},
      {"actuation", &C::actuation},          {"actuator_tau", &C::actuator_tau},
      {"anchoring", &C::anchoring},          {"coulomb_forward", &C::coulomb_forward},
      {"coulomb_backward", &C::coulomb_backward},
      {"origin", &C::origin},
  };
  return b;
}

const std::vector<Binding<PointNavigatorConstants>>& navigator_bindings() {
  using C = PointNavigatorConstants;
  static const std::vector<Binding<C>> b = {
      {"dt", &C::dt},
      {"mass", &C::mass},
      {"force_gain", &C::force_gain},
      {"damping", &C::damping},
      {"waypoints", nullptr, &C::waypoints},
      {"waypoint_min_distance", &C::waypoint_min_distance},
      {"waypoint_max_distance", &C::waypoint_max_distance},
      {"capture_radius", &C::capture_radius},
      {"sensor_range", &C::sensor_range},
  };
  return b;
}

template <class Constants>
Constants bind(const std::vector<Binding<Constants>>& bindings,
               const std::map<std::string, double>& overrides) {
  Constants c;
  for (const auto& [key, value] : overrides) {
    auto it = std::find_if(bindings.begin(), bindings.end(),
                           [&](const auto& b) { return key == b.name; });
    if (it == bindings.end()) {
      throw ConfigError("environment.constants." + key, "unknown constant");
    }
    if (!std::isfinite(value)) {
      throw ConfigError("environment.constants." + key, "must be finite");
    }
    if (it->integer) {
      if (value != std::floor(value) || std::abs(value) > 1e9) {
        throw ConfigError("environment.constants." + key, "must be an integer");
      }
      c.*(it->integer) = static_cast<int>(value);
    } else {
      c.*(it->real) = value;
    }
  }
  return c;
}

template <class Constants>
std::map<std::string, double> dump(const std::vector<Binding<Constants>>& bindings,
                                   const Constants& c) {
  std::map<std::string, double> out;
  for (const auto& b : bindings) {
    out[b.name] = b.integer ? static_cast<double>(c.*(b.integer)) : c.*(b.real);
  }
  return out;
}

void check_name(const EnvSpec& spec) {
  if (spec.name != "segment_crawler" && spec.name != "point_navigator") {
    throw ConfigError("environment.name", "unknown environment '" + spec.name +
                                              "' (expected segment_crawler or point_navigator)");
  }
}

}  // namespace

std::unique_ptr<Environment> make_environment(const EnvSpec& spec, std::size_t max_steps) {
  check_name(spec);
  if (spec.name == "segment_crawler") {
    return std::make_unique<SegmentCrawler>(bind(crawler_bindings(), spec.constants),
                                            max_steps);
  }
  return std::make_unique<PointNavigator>(bind(navigator_bindings(), spec.constants),
                                          max_steps);
}

std::size_t env_observation_dim(const EnvSpec& spec) {
  return make_environment(spec, 1)->observation_dim();
}

std::size_t env_action_dim(const EnvSpec& spec) {
  return make_environment(spec, 1)->action_dim();
}

std::map<std::string, double> resolved_constants(const EnvSpec& spec) {
  check_name(spec);
  if (spec.name == "segment_crawler") {
    return dump(crawler_bindings(), bind(crawler_bindings(), spec.constants));
  }
  return dump(navigator_bindings(), bind(navigator_bindings(), spec.constants));
}

// Evaluation loop.

EpisodeResult run_episode(const Genome& genome, const EvalSpec& spec,
                          std::size_t episode_index, bool capture) {
  auto env = make_environment(spec.env, spec.episode_steps);
  const Topology& topo = genome.topology();
  if (static_cast<std::size_t>(topo.input_size()) != env->observation_dim() ||
      static_cast<std::size_t>(topo.output_size()) != env->action_dim()) {
    throw DimensionError("genome topology " + topo.to_string() + " does not fit " +
                         spec.env.name + " (observation " +
                         std::to_string(env->observation_dim()) + ", action " +
                         std::to_string(env->action_dim()) + ")");
  }

  EpisodeResult result;
  if (capture) {
    result.trajectory.emplace();
    result.trajectory->input_dim = env->observation_dim();
    result.trajectory->output_dim = env->action_dim();
  }
  auto record = [&](std::span<const double> in, std::span<const double> pre,
                    std::span<const double> post) {
    if (!capture) return;
    auto& tr = *result.trajectory;
    tr.inputs.emplace_back(in.begin(), in.end());
    tr.pre.emplace_back(pre.begin(), pre.end());
    tr.post.emplace_back(post.begin(), post.end());
  };

  std::vector<double> obs;
  {
    auto o = env->reset(derive_seed(spec.seed, Stream::kEpisode, episode_index));
    obs.assign(o.begin(), o.end());
  }
  std::vector<double> action(env->action_dim());

  if (genome.scheme() == Scheme::kWeightlessNeuronCentric) {
    if (spec.init.mode != WeightInit::Mode::kZeros) {
      throw std::invalid_argument("weightless evaluation requires zero weight init");
    }
    WeightlessNetwork net(genome, spec.memory_window);
    for (std::size_t t = 0; t < spec.episode_steps; ++t) {
      auto out = net.step(obs);
      record(obs, net.output_presynaptic_sums(), out);
      action.assign(out.begin(), out.end());
      StepResult r = env->step(action);
      if (r.failed) { result.failed = true; break; }
      obs.assign(r.observation.begin(), r.observation.end());
      if (r.done) break;
    }
  } else {
    PlasticNetwork net(topo);
    net.init_weights(spec.init, derive_seed(spec.seed, Stream::kWeights, episode_index));
    const HebbianRule rule(genome);
    for (std::size_t t = 0; t < spec.episode_steps; ++t) {
      auto out = net.forward(obs);
      rule.apply(net);
      record(obs, net.output_presynaptic_sums(), out);
      action.assign(out.begin(), out.end());
      StepResult r = env->step(action);
      if (r.failed) { result.failed = true; break; }
      obs.assign(r.observation.begin(), r.observation.end());
      if (r.done) break;
    }
  }
  result.fitness = env->fitness();
  return result;
}

double evaluate(const Genome& genome, const EvalSpec& spec) {
  if (spec.episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  double sum = 0.0;
  for (std::size_t e = 0; e < spec.episodes; ++e) {
    sum += run_episode(genome, spec, e, false).fitness;
  }
  return sum / static_cast<double>(spec.episodes);
}

}  // namespace nchl
