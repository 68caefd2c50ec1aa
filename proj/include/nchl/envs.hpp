#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nchl/network.hpp"
#include "nchl/plasticity.hpp"
#include "nchl/trajectory.hpp"

namespace nchl {

struct StepResult {
  std::span<const double> observation;
  bool done = false;
  bool failed = false;  // episode aborted on a non-finite action
};

// Episodic control task. Fitness follows the locomotion convention: larger
// is better, measured as distance or progress made during the episode.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::size_t observation_dim() const = 0;
  virtual std::size_t action_dim() const = 0;
  std::size_t max_steps() const { return max_steps_; }
  std::size_t steps_taken() const { return steps_; }

  // Deterministic in `seed`.
  virtual std::span<const double> reset(std::uint64_t seed) = 0;
  // Actions are clamped to [-1, 1]. A non-finite entry ends the episode as
  // failed; fitness keeps its value from before the call.
  StepResult step(std::span<const double> action);
  virtual double fitness() const = 0;
  virtual std::span<const double> observation() const = 0;

 protected:
  explicit Environment(std::size_t max_steps) : max_steps_(max_steps) {}
  virtual std::span<const double> advance(std::span<const double> clamped) = 0;
  void restart() { steps_ = 0; failed_ = false; }

 private:
  std::size_t max_steps_;
  std::size_t steps_ = 0;
  bool failed_ = false;
  std::vector<double> clamped_;
};

// Chain of point segments on a line joined by actuated spring links, with
// anisotropic (forward-slippery) viscous ground friction. Moving requires
// an oscillating gait; fitness is the displacement of the centre of mass.
//
// Observation (2K values): per segment, mean length ratio of its adjacent
// links (length / rest_length, 1 at rest) followed by its velocity. Action: per link target extension in [-1, 1].
struct SegmentCrawlerConstants {
  int segments = 5;
  double dt = 0.05;
  double mass = 1.0;
  double rest_length = 1.0;
  double stiffness = 30.0;
  double link_damping = 1.0;
  double drag_forward = 0.5;
  double drag_backward = 0.55;
  double actuation = 0.3;  // target length = rest * (1 + actuation * drive)
  // Drive follows the action through a first-order lag with this time
  // constant, like muscle activation; 0 applies actions instantly.
  double actuator_tau = 0.5;
  // Drag multiplier 1 + anchoring * c, where c in [0, 1] is how far the
  // segment is contracted (c = 1 at a length ratio of 1 - actuation).
  double anchoring = 19.0;
  // Coulomb ground friction per segment (force units) for forward and
  // backward sliding, scaled by the same anchoring multiplier. A segment at
  // rest stays put until the link forces on it exceed this.
  double coulomb_forward = 1.5;
  double coulomb_backward = 1.8;
  double origin = 0.0;     // absolute position of the tail segment at reset
};

class SegmentCrawler final : public Environment {
 public:
  SegmentCrawler(SegmentCrawlerConstants constants, std::size_t max_steps);

  std::size_t observation_dim() const override { return 2 * c_.segments; }
  std::size_t action_dim() const override { return c_.segments - 1; }
  std::span<const double> reset(std::uint64_t seed) override;
  double fitness() const override;
  std::span<const double> observation() const override { return obs_; }

  // Absolute positions, for inspection.
  std::vector<double> positions() const;
  std::span<const double> velocities() const { return vel_; }

 private:
  std::span<const double> advance(std::span<const double> action) override;
  void observe();

  SegmentCrawlerConstants c_;
  std::vector<double> disp_;  // displacement of each segment from its rest slot
  std::vector<double> vel_;
  std::vector<double> force_;
  std::vector<double> drive_;  // filtered actuator command per link
  std::vector<double> obs_;
};

// Point mass on a plane with linear damping that has to visit a seeded
// sequence of waypoints. Fitness is path progress: length of the completed
// path segments plus the distance already closed on the current one.
//
// Observation (4 values): vector to the current waypoint divided by
// sensor_range and clipped to unit length, then velocity. Action: force.
struct PointNavigatorConstants {
  double dt = 0.1;
  double mass = 1.0;
  double force_gain = 1.0;
  double damping = 1.0;
  int waypoints = 32;
  double waypoint_min_distance = 2.0;
  double waypoint_max_distance = 4.0;
  double capture_radius = 0.25;
  double sensor_range = 4.0;
};

inline constexpr double kMinNavigatorDamping = 0.1;

class PointNavigator final : public Environment {
 public:
  PointNavigator(PointNavigatorConstants constants, std::size_t max_steps);

  std::size_t observation_dim() const override { return 4; }
  std::size_t action_dim() const override { return 2; }
  std::span<const double> reset(std::uint64_t seed) override;
  double fitness() const override;
  std::span<const double> observation() const override { return obs_; }

  const std::vector<std::array<double, 2>>& waypoints() const { return waypoints_; }
  std::size_t waypoints_reached() const { return current_; }
  std::array<double, 2> position() const { return pos_; }

 private:
  std::span<const double> advance(std::span<const double> action) override;
  void observe();
  double distance_to_current() const;

  PointNavigatorConstants c_;
  std::vector<std::array<double, 2>> waypoints_;
  std::vector<double> completed_length_;  // prefix sums of segment lengths
  std::size_t current_ = 0;
  std::array<double, 2> pos_{};
  std::array<double, 2> vel_{};
  std::vector<double> obs_;
};

// Environment name plus constant overrides, as read from a run config.
struct EnvSpec {
  std::string name = "segment_crawler";
  std::map<std::string, double> constants;
};

// Throws ConfigError naming the constant on unknown names or invalid values.
std::unique_ptr<Environment> make_environment(const EnvSpec& spec, std::size_t max_steps);
std::size_t env_observation_dim(const EnvSpec& spec);
std::size_t env_action_dim(const EnvSpec& spec);
// All constants of the named environment with overrides applied.
std::map<std::string, double> resolved_constants(const EnvSpec& spec);

struct EvalSpec {
  EnvSpec env;
  std::size_t episode_steps = 1000;
  std::size_t episodes = 1;
  WeightInit init;
  std::size_t memory_window = 0;  // weightless scheme only
  std::uint64_t seed = 0;         // episode e uses streams derived from (seed, e)
};

struct EpisodeResult {
  double fitness = 0.0;
  bool failed = false;
  std::optional<TrajectoryRecord> trajectory;
};

// One rollout: observation -> forward -> Hebbian update -> action.
EpisodeResult run_episode(const Genome& genome, const EvalSpec& spec,
                          std::size_t episode_index, bool capture);

// Mean fitness over spec.episodes rollouts.
double evaluate(const Genome& genome, const EvalSpec& spec);

// Fitness of a single controller that ignores plasticity: `policy` maps the
// observation to an action each step. Used for baselines and oracles.
template <class Policy>
double rollout_policy(Environment& env, std::uint64_t seed, Policy&& policy) {
  auto obs = env.reset(seed);
  std::vector<double> o(obs.begin(), obs.end());
  for (std::size_t t = 0; t < env.max_steps(); ++t) {
    std::vector<double> action = policy(std::span<const double>(o), t);
    StepResult r = env.step(action);
    o.assign(r.observation.begin(), r.observation.end());
    if (r.done) break;
  }
  return env.fitness();
}

}  // namespace nchl
