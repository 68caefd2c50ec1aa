#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nchl/analysis.hpp"
#include "nchl/errors.hpp"
#include "nchl/rng.hpp"

using namespace nchl;

namespace {

Matrix rank2_data(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> u(cols), v(cols), offset(cols);
  for (std::size_t d = 0; d < cols; ++d) {
    u[d] = n(rng);
    v[d] = n(rng);
    offset[d] = n(rng);
  }
  Matrix data(rows, std::vector<double>(cols));
  for (auto& row : data) {
    const double a = 3.0 * n(rng), b = n(rng);
    for (std::size_t d = 0; d < cols; ++d) row[d] = offset[d] + a * u[d] + b * v[d];
  }
  return data;
}

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

TrajectoryRecord make_record(const Matrix& rows, const std::string& label) {
  TrajectoryRecord r;
  r.input_dim = rows.front().size();
  r.output_dim = rows.front().size();
  r.inputs = rows;
  r.pre = rows;
  r.post = rows;
  r.label = label;
  return r;
}

}  // namespace

TEST_CASE("jacobi eigen on a known matrix") {
  const auto e = jacobi_eigen({{2, 1}, {1, 2}});
  CHECK(e.eigenvalues[0] == doctest::Approx(3.0));
  CHECK(e.eigenvalues[1] == doctest::Approx(1.0));
  CHECK(std::abs(e.eigenvectors[0][0]) == doctest::Approx(std::sqrt(0.5)));
  const auto diag = jacobi_eigen({{1, 0, 0}, {0, 5, 0}, {0, 0, 3}});
  CHECK(diag.eigenvalues == std::vector<double>{5, 3, 1});
}

TEST_CASE("pca on a diagonal line") {
  Matrix data;
  for (int i = -5; i <= 5; ++i) data.push_back({0.3 * i, 0.3 * i});
  const PcaModel m = pca_fit(data, 1);
  CHECK(m.components[0][0] == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(m.components[0][1] == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(m.explained_variance[0] == doctest::Approx(1.0));
  CHECK_FALSE(m.degenerate);
}

TEST_CASE("pca sign convention") {
  Matrix data;
  for (int i = -5; i <= 5; ++i) data.push_back({0.1 * i, -2.0 * i});
  const PcaModel m = pca_fit(data, 1);
  CHECK(m.components[0][1] > 0.0);
  CHECK(std::abs(m.components[0][1]) > std::abs(m.components[0][0]));
}

TEST_CASE("rank-2 data in ten dimensions") {
  const Matrix data = rank2_data(200, 10, 4);
  const PcaModel m = pca_fit(data, 2);
  CHECK(m.explained_variance[0] + m.explained_variance[1] >= 0.999999);
  CHECK(m.explained_variance[0] >= m.explained_variance[1]);
  double dot = 0.0;
  for (std::size_t d = 0; d < 10; ++d) dot += m.components[0][d] * m.components[1][d];
  CHECK(std::abs(dot) < 1e-10);
}

TEST_CASE("full basis reconstructs the data") {
  Rng rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Matrix data(30, std::vector<double>(6));
  for (auto& r : data) for (double& v : r) v = u(rng);
  const PcaModel m = pca_fit(data, 6);
  for (const auto& row : data) {
    const auto back = m.reconstruct(m.project(row));
    for (std::size_t d = 0; d < 6; ++d) CHECK(std::abs(back[d] - row[d]) < 1e-8);
  }
}

TEST_CASE("projection never expands distances") {
  Rng rng(12);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix data(40, std::vector<double>(5));
  for (auto& r : data) for (double& v : r) v = n(rng);
  const PcaModel m = pca_fit(data, 2);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = i + 1; j < data.size(); ++j) {
      CHECK(dist(m.project(data[i]), m.project(data[j])) <= dist(data[i], data[j]) + 1e-12);
    }
  }
}

TEST_CASE("degenerate and invalid pca input") {
  const PcaModel m = pca_fit({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}}, 2);
  CHECK(m.degenerate);
  CHECK(m.total_variance == 0.0);
  CHECK(m.components.size() == 2);
  CHECK_THROWS(pca_fit({{1, 2}}, 1));
  CHECK_THROWS(pca_fit({{1, 2}, {3, 4}}, 3));
  CHECK_THROWS_AS(pca_fit({{1, 2}, {3}}, 1), DimensionError);
}

TEST_CASE("identical trajectories average to the single projection") {
  const Matrix rows = rank2_data(25, 4, 2);
  std::vector<TrajectoryRecord> recs(30, make_record(rows, "x"));
  const auto avg = average_trajectories(recs, TrajectoryFamily::kPost);
  const PcaModel m = pca_fit(rows, 2);
  REQUIRE(avg.size() == 25);
  for (std::size_t t = 0; t < 25; ++t) {
    const auto p = m.project(rows[t]);
    CHECK(avg[t].f1 == doctest::Approx(p[0]).epsilon(1e-9));
    CHECK(avg[t].f2 == doctest::Approx(p[1]).epsilon(1e-9));
    CHECK(avg[t].step == t);
  }
}

TEST_CASE("mirrored trajectories cancel") {
  const Matrix rows = rank2_data(20, 3, 6);
  Matrix mirrored = rows;
  for (auto& r : mirrored) for (double& v : r) v = -v;
  std::vector<TrajectoryRecord> recs;
  for (int k = 0; k < 5; ++k) {
    recs.push_back(make_record(rows, "a"));
    recs.push_back(make_record(mirrored, "a"));
  }
  for (const auto& p : average_trajectories(recs, TrajectoryFamily::kInput)) {
    CHECK(std::abs(p.f1) < 1e-9);
    CHECK(std::abs(p.f2) < 1e-9);
  }
}

TEST_CASE("labelled groups share one basis") {
  const Matrix a = rank2_data(10, 3, 1);
  Matrix b = a;
  for (auto& r : b) for (double& v : r) v *= 0.5;
  const auto groups = average_trajectories_by_label(
      {make_record(a, "big"), make_record(b, "small"), make_record(a, "big")},
      TrajectoryFamily::kPre);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].label == "big");
  CHECK(groups[1].label == "small");
  CHECK(bounding_box_area(groups[0].points) > bounding_box_area(groups[1].points));
  const std::string csv = projected_to_csv(groups);
  CHECK(csv.rfind("f1,f2,step,label\n", 0) == 0);

  CHECK_THROWS(average_trajectories({}, TrajectoryFamily::kPost));
  Matrix shorter(a.begin(), a.begin() + 5);
  CHECK_THROWS_AS(average_trajectories({make_record(a, "x"), make_record(shorter, "x")},
                                       TrajectoryFamily::kPost),
                  DimensionError);
}

TEST_CASE("bounding box area") {
  CHECK(bounding_box_area({}) == 0.0);
  CHECK(bounding_box_area({{0, 0, 0}, {2, 1, 1}, {-1, 3, 2}}) == 9.0);
}

TEST_CASE("scaling table") {
  const auto one = scaling_table(50, {1});
  for (const auto& r : one) {
    CHECK(r.synaptic == static_cast<std::size_t>(5 * 2 * r.width));
    CHECK(r.neuron_centric == static_cast<std::size_t>(5 * (r.width + 2)));
  }
  CHECK(one[0].synaptic == 10);
  CHECK(one[0].neuron_centric == 15);
  const auto three = scaling_table(100, {3});
  CHECK(three.back().synaptic == 101000);
  CHECK(scaling_to_csv(one).rfind("hidden_layers,width,hl,nchl\n", 0) == 0);
  CHECK_THROWS(scaling_table(0, {1}));
}

TEST_CASE("log-log slopes of the scaling curves") {
  std::vector<double> w, hl, nchl;
  for (const auto& r : scaling_table(100, {2})) {
    if (r.width < 10) continue;
    w.push_back(r.width);
    hl.push_back(static_cast<double>(r.synaptic));
    nchl.push_back(static_cast<double>(r.neuron_centric));
  }
  CHECK(loglog_slope(w, hl) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(loglog_slope(w, nchl) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(loglog_slope({1, 10, 100}, {3, 300, 30000}) == doctest::Approx(2.0));
  CHECK_THROWS(loglog_slope({1}, {1}));
}

TEST_CASE("window sweep") {
  const Topology topo({4, 6, 2});
  std::vector<Genome> genomes;
  for (std::uint64_t s = 0; s < 6; ++s) {
    genomes.push_back(random_rule_genome(Scheme::kNeuronCentric, topo, EtaMode::evolving(), s));
  }
  EvalSpec spec;
  spec.env = {"point_navigator", {}};
  spec.episode_steps = 40;
  spec.seed = 1;
  const auto rows = window_sweep(genomes, spec, {2, 40}, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].memory_ratio == doctest::Approx(2.0 * 12 / 36));
  CHECK(rows[1].f_ratios.size() == 6);
  for (const auto& r : rows[1].f_ratios) {
    if (r) CHECK(*r == 1.0);
  }
  if (rows[1].defined > 0) CHECK(rows[1].f_ratio_median == 1.0);
  const std::string csv = sweep_to_csv(rows);
  CHECK(csv.rfind("memory_window,f_ratio_mean", 0) == 0);

  CHECK_THROWS(window_sweep(genomes, spec, {0}));
  CHECK_THROWS_AS(window_sweep({genomes[0].with_scheme(Scheme::kWeightlessNeuronCentric)}, spec,
                               {2}),
                  SchemeError);
}

TEST_CASE("memory ratio for the ant-medium network") {
  const Topology ant({28, 128, 64, 8});
  CHECK(2.0 * ant.neuron_count() / ant.synapse_count() == doctest::Approx(0.0371).epsilon(1e-2));
}
