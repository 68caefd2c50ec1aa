#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "nchl/envs.hpp"
#include "nchl/errors.hpp"

using namespace nchl;

namespace {

std::vector<double> sync_gait(std::size_t t, std::size_t links) {
  return std::vector<double>(links, (t / 10) % 2 == 0 ? 1.0 : -1.0);
}

}  // namespace

TEST_CASE("crawler starts at rest") {
  SegmentCrawler env({}, 100);
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    auto obs = env.reset(seed);
    REQUIRE(obs.size() == 10);
    for (std::size_t s = 0; s < 5; ++s) {
      CHECK(obs[2 * s] == 1.0);
      CHECK(obs[2 * s + 1] == 0.0);
    }
    CHECK(env.fitness() == 0.0);
  }
  CHECK(env.action_dim() == 4);
}

TEST_CASE("crawler without actuation stays put") {
  SegmentCrawler env({}, 500);
  const double f = rollout_policy(env, 3, [](std::span<const double>, std::size_t) {
    return std::vector<double>(4, 0.0);
  });
  CHECK(std::abs(f) <= 1e-9);
}

TEST_CASE("synchronous alternating gait moves forward") {
  SegmentCrawler env({}, 1000);
  const double f = rollout_policy(env, 0, [](std::span<const double>, std::size_t t) {
    return sync_gait(t, 4);
  });
  CHECK(f > 0.0);
}

TEST_CASE("crawler fitness is translation invariant") {
  SegmentCrawlerConstants shifted;
  shifted.origin = 123.25;
  SegmentCrawler a({}, 300), b(shifted, 300);
  auto gait = [](std::span<const double>, std::size_t t) { return sync_gait(t, 4); };
  CHECK(rollout_policy(a, 0, gait) == rollout_policy(b, 0, gait));
  CHECK(b.positions()[0] - a.positions()[0] == doctest::Approx(123.25));
}

TEST_CASE("crawler rejects invalid constants") {
  SegmentCrawlerConstants c;
  c.segments = 1;
  CHECK_THROWS_AS(SegmentCrawler(c, 10), ConfigError);
  c = {};
  c.coulomb_forward = -1;
  CHECK_THROWS_AS(SegmentCrawler(c, 10), ConfigError);
}

TEST_CASE("navigator layouts are seeded") {
  PointNavigator a({}, 100), b({}, 100);
  auto oa = a.reset(5);
  auto ob = b.reset(5);
  CHECK(std::vector<double>(oa.begin(), oa.end()) == std::vector<double>(ob.begin(), ob.end()));
  CHECK(a.waypoints() == b.waypoints());
  b.reset(6);
  CHECK(a.waypoints() != b.waypoints());
  CHECK(a.waypoints().size() == 32);
  for (std::size_t w = 1; w < a.waypoints().size(); ++w) {
    const double d = std::hypot(a.waypoints()[w][0] - a.waypoints()[w - 1][0],
                                a.waypoints()[w][1] - a.waypoints()[w - 1][1]);
    CHECK(d >= 2.0);
    CHECK(d <= 4.0);
  }
}

TEST_CASE("greedy navigator makes steady progress") {
  PointNavigator env({}, 400);
  auto obs = env.reset(11);
  double prev = env.fitness();
  CHECK(prev == 0.0);
  std::vector<double> o(obs.begin(), obs.end());
  std::size_t reached_at = 0;
  for (std::size_t t = 0; t < 400 && env.waypoints_reached() == 0; ++t) {
    const double n = std::hypot(o[0], o[1]);
    StepResult r = env.step(std::vector<double>{o[0] / n, o[1] / n});
    o.assign(r.observation.begin(), r.observation.end());
    if (env.waypoints_reached() == 0) {
      CHECK(env.fitness() > prev);
      prev = env.fitness();
    } else {
      reached_at = t;
    }
  }
  CHECK(env.waypoints_reached() >= 1);
  CHECK(reached_at > 0);
}

TEST_CASE("episode bookkeeping") {
  PointNavigator env({}, 3);
  env.reset(0);
  const std::vector<double> zero{0.0, 0.0};
  CHECK_FALSE(env.step(zero).done);
  CHECK_FALSE(env.step(zero).done);
  CHECK(env.step(zero).done);
  CHECK_THROWS_AS(env.step(zero), std::logic_error);
  env.reset(0);
  CHECK_THROWS_AS(env.step(std::vector<double>{1.0}), DimensionError);

  const std::vector<double> bad{std::numeric_limits<double>::quiet_NaN(), 0.0};
  const std::vector<double> push{1.0, 0.0};
  env.step(push);
  const double before = env.fitness();
  StepResult r = env.step(bad);
  CHECK(r.failed);
  CHECK(r.done);
  CHECK(env.fitness() == before);
}

TEST_CASE("actions are clamped") {
  PointNavigator a({}, 10), b({}, 10);
  a.reset(2);
  b.reset(2);
  a.step(std::vector<double>{5.0, -7.0});
  b.step(std::vector<double>{1.0, -1.0});
  CHECK(a.position() == b.position());
}

TEST_CASE("environment factory") {
  EnvSpec crawler;
  CHECK(env_observation_dim(crawler) == 10);
  CHECK(env_action_dim(crawler) == 4);
  crawler.constants["segments"] = 8;
  CHECK(env_observation_dim(crawler) == 16);
  crawler.constants["segments"] = 2.5;
  CHECK_THROWS_AS(make_environment(crawler, 10), ConfigError);

  EnvSpec nav{"point_navigator", {}};
  CHECK(env_observation_dim(nav) == 4);
  CHECK(env_action_dim(nav) == 2);
  CHECK(resolved_constants(nav).at("waypoints") == 32);
  nav.constants["gravity"] = 1;
  CHECK_THROWS_AS(make_environment(nav, 10), ConfigError);
  CHECK_THROWS_AS(make_environment({"cartpole", {}}, 10), ConfigError);
}

TEST_CASE("episode rollout") {
  EvalSpec spec;
  spec.env = {"point_navigator", {}};
  spec.episode_steps = 50;
  spec.init = WeightInit::uniform(-0.1, 0.1);
  spec.seed = 3;
  const Genome g = random_rule_genome(Scheme::kNeuronCentric, Topology({4, 8, 2}),
                                      EtaMode::evolving(), 1);
  const EpisodeResult a = run_episode(g, spec, 0, true);
  const EpisodeResult b = run_episode(g, spec, 0, false);
  CHECK(a.fitness == b.fitness);
  REQUIRE(a.trajectory);
  CHECK(a.trajectory->steps() == 50);
  CHECK(a.trajectory->inputs[0].size() == 4);
  CHECK(a.trajectory->post[0].size() == 2);
  CHECK_FALSE(b.trajectory);
  for (std::size_t t = 0; t < 50; ++t) {
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(a.trajectory->post[t][k] == std::tanh(a.trajectory->pre[t][k]));
    }
  }
  spec.episodes = 2;
  CHECK(evaluate(g, spec) ==
        (run_episode(g, spec, 0, false).fitness + run_episode(g, spec, 1, false).fitness) / 2.0);

  const Genome wrong = random_rule_genome(Scheme::kNeuronCentric, Topology({3, 2}),
                                          EtaMode::evolving(), 1);
  CHECK_THROWS_AS(run_episode(wrong, spec, 0, false), DimensionError);
  spec.memory_window = 5;
  CHECK_THROWS(run_episode(g.with_scheme(Scheme::kWeightlessNeuronCentric), spec, 0, false));
  spec.init = WeightInit::zeros();
  CHECK_NOTHROW(run_episode(g.with_scheme(Scheme::kWeightlessNeuronCentric), spec, 0, false));
}
