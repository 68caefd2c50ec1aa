#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nchl/errors.hpp"
#include "nchl/genome_io.hpp"
#include "nchl/run.hpp"

using namespace nchl;
namespace fs = std::filesystem;

namespace {

RunConfig small_config(const std::string& strategy = "es1") {
  std::string s = strategy == "es1"
                      ? R"({"name":"es1","population_size":6,"generations":3})"
                      : R"({"name":"es2","population_size":6,"generations":3})";
  return parse_run_config(R"({"schema_version":1,"scheme":"neuron_centric","topology":[4,5,2],
    "environment":{"name":"point_navigator"},"strategy":)" + s +
                          R"(,"seed":3,"episode_steps":30})");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nchl_test_run_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-7) == "-2.5e-07");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("log rows") {
  CHECK(log_header() == "generation,best,mean,std,sigma,lr,wall_ms\n");
  GenerationReport r{4, 1.5, 0.5, 0.25, 0.35, 0.0, 12.3};
  CHECK(log_row(r, false) == "4,1.5,0.5,0.25,0.35,0,0\n");
  CHECK(log_row(r, true) == "4,1.5,0.5,0.25,0.35,0,12.3\n");
}

TEST_CASE("initial population is seeded") {
  const RunConfig c = small_config();
  const auto a = initial_population(c);
  CHECK(a.size() == 6);
  CHECK(a == initial_population(c));
  CHECK(a[0] != a[1]);
  CHECK(initial_population(small_config("es2")).size() == 1);
}

TEST_CASE("evolve is reproducible and thread independent") {
  for (const char* s : {"es1", "es2"}) {
    const RunConfig c = small_config(s);
    const EvolveResult a = evolve(c, 1);
    const EvolveResult b = evolve(c, 3);
    CHECK(a.reports.size() == 3);
    CHECK(a.best.values() == b.best.values());
    CHECK(a.best_fitness == b.best_fitness);
    CHECK(a.best.topology() == c.topology);
    for (std::size_t g = 0; g < 3; ++g) CHECK(log_row(a.reports[g], false) == log_row(b.reports[g], false));
  }
}

TEST_CASE("run_evolve writes its artifacts") {
  const fs::path dir = scratch("evolve");
  EvolveOptions opt;
  opt.out_dir = dir;
  const EvolveResult r = run_evolve(small_config(), opt);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "best.json"));
  CHECK(fs::exists(dir / "checkpoints" / "gen_00000.json"));
  CHECK(fs::exists(dir / "checkpoints" / "gen_00002.json"));
  const std::string log = slurp(dir / "log.csv");
  CHECK(log.rfind(log_header(), 0) == 0);
  CHECK(std::count(log.begin(), log.end(), '\n') == 4);
  CHECK(load_genome(dir / "best.json").values() == r.best.values());

  const fs::path again = scratch("evolve_again");
  opt.out_dir = again;
  opt.threads = 2;
  run_evolve(load_run_config(dir / "manifest.json"), opt);
  CHECK(slurp(again / "log.csv") == log);
  CHECK(slurp(again / "manifest.json") == slurp(dir / "manifest.json"));

  const fs::path other = scratch("evolve_seed");
  opt.out_dir = other;
  opt.seed_override = 99;
  run_evolve(small_config(), opt);
  CHECK(nlohmann::json::parse(slurp(other / "manifest.json")).at("seed") == 99);
  CHECK(slurp(other / "log.csv") != log);
  for (const auto& p : {dir, again, other}) fs::remove_all(p);
}

TEST_CASE("reference count report") {
  const std::string t = table1_report();
  CHECK(t.rfind("task,shape,configuration,input,hidden,output,hl,nchl,ratio\n", 0) == 0);
  CHECK(std::count(t.begin(), t.end(), '\n') == 9);
  CHECK(t.find("120,46,2.60") != std::string::npos);
  CHECK(t.find("204800,2100,97.52") != std::string::npos);
  CHECK(t.find(",128;64,") != std::string::npos);
}

TEST_CASE("count report") {
  const std::string c = count_report(Topology({28, 256, 128, 8}), Scheme::kNeuronCentric,
                                     EtaMode::evolving());
  CHECK(c.rfind("topology,synapses,neurons,eta,scheme,total,hl,nchl,ratio\n", 0) == 0);
  CHECK(c.find("204800,2100,97.52") != std::string::npos);
}

TEST_CASE("windows parsing") {
  CHECK(parse_windows("2,25,50") == std::vector<std::size_t>{2, 25, 50});
  for (const char* bad : {"", "0", "2,,3", "x", "-1", "2.5"}) {
    CHECK_THROWS_AS(parse_windows(bad), ConfigError);
  }
}

TEST_CASE("checkpoint loading") {
  const fs::path dir = scratch("ckpt");
  CHECK_THROWS_AS(load_checkpoints(dir), ConfigError);
  fs::create_directories(dir);
  CHECK_THROWS_AS(load_checkpoints(dir), ConfigError);
  const Topology t({4, 5, 2});
  save_genome(random_rule_genome(Scheme::kNeuronCentric, t, EtaMode::evolving(), 1), dir / "b.json");
  save_genome(random_rule_genome(Scheme::kNeuronCentric, t, EtaMode::evolving(), 2), dir / "a.json");
  const auto gs = load_checkpoints(dir);
  REQUIRE(gs.size() == 2);
  CHECK(gs[0].values() == random_rule_genome(Scheme::kNeuronCentric, t, EtaMode::evolving(), 2).values());
  save_genome(random_rule_genome(Scheme::kSynaptic, t, EtaMode::evolving(), 3), dir / "c.json");
  CHECK_THROWS_AS(load_checkpoints(dir), SchemeError);
  fs::remove(dir / "c.json");
  save_genome(random_rule_genome(Scheme::kNeuronCentric, Topology({4, 2}), EtaMode::evolving(), 3),
              dir / "c.json");
  CHECK_THROWS_AS(load_checkpoints(dir), DimensionError);
  fs::remove(dir / "c.json");

  RunConfig cfg = small_config();
  cfg.init = WeightInit::zeros();
  const std::string csv = run_sweep(cfg, dir, "2,30", 1);
  CHECK(csv.rfind("memory_window,", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("eval and analyze") {
  const fs::path dir = scratch("eval");
  fs::create_directories(dir);
  RunConfig cfg = small_config();
  const Genome g = random_rule_genome(Scheme::kNeuronCentric, cfg.topology, EtaMode::evolving(), 5);
  const EvalOutcome one = run_eval(cfg, g, dir / "a.csv", "evolved");
  CHECK(one.captures == std::vector<fs::path>{dir / "a.csv"});
  CHECK(one.fitness == evaluate(g, cfg.eval_spec()));

  cfg.episodes_per_eval = 2;
  const EvalOutcome two = run_eval(cfg, g, dir / "b.csv", "");
  CHECK(two.episode_fitness.size() == 2);
  CHECK(two.captures == std::vector<fs::path>{dir / "b_e0.csv", dir / "b_e1.csv"});
  CHECK(two.fitness == (two.episode_fitness[0] + two.episode_fitness[1]) / 2.0);

  const std::string out = run_analyze({dir / "a.csv", dir / "b_e0.csv"}, TrajectoryFamily::kPost);
  CHECK(out.rfind("f1,f2,step,label\n", 0) == 0);
  CHECK(out.find(",evolved\n") != std::string::npos);
  CHECK(out.find(",b_e0\n") != std::string::npos);

  RunConfig wide = small_config();
  wide.topology = Topology({4, 5, 2});
  wide.episode_steps = 10;
  run_eval(wide, g, dir / "short.csv", "x");
  CHECK_THROWS_AS(run_analyze({dir / "a.csv", dir / "short.csv"}, TrajectoryFamily::kPost),
                  DimensionError);
  fs::remove_all(dir);
}
