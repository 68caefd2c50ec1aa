#include "nchl/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "nchl/errors.hpp"
#include "nchl/evolution.hpp"

namespace nchl {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (i != j) s += a[i][j] * a[i][j];
    }
  }
  return std::sqrt(s);
}

std::string fmt(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

SymmetricEigen jacobi_eigen(Matrix a, double tolerance, int max_sweeps) {
  const std::size_t n = a.size();
  for (const auto& row : a) {
    if (row.size() != n) throw std::invalid_argument("jacobi_eigen: matrix must be square");
  }
  Matrix v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  double frob = 0.0;
  for (const auto& row : a) {
    for (double x : row) frob += x * x;
  }
  frob = std::sqrt(frob);

  SymmetricEigen out;
  const double threshold = tolerance * frob;
  while (out.sweeps < max_sweeps && off_diagonal_norm(a) > threshold) {
    ++out.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p][q];
        if (apq == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        a[p][q] = a[q][p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  for (std::size_t idx : order) {
    out.eigenvalues.push_back(a[idx][idx]);
    std::vector<double> vec(n);
    for (std::size_t k = 0; k < n; ++k) vec[k] = v[k][idx];
    out.eigenvectors.push_back(std::move(vec));
  }
  return out;
}

std::vector<double> PcaModel::project(const std::vector<double>& row) const {
  if (row.size() != mean.size()) throw DimensionError("pca: row dimension mismatch");
  std::vector<double> out(components.size(), 0.0);
  for (std::size_t c = 0; c < components.size(); ++c) {
    double acc = 0.0;
    for (std::size_t d = 0; d < row.size(); ++d) acc += (row[d] - mean[d]) * components[c][d];
    out[c] = acc;
  }
  return out;
}

std::vector<double> PcaModel::reconstruct(const std::vector<double>& projected) const {
  if (projected.size() != components.size()) {
    throw DimensionError("pca: projection dimension mismatch");
  }
  std::vector<double> out = mean;
  for (std::size_t c = 0; c < components.size(); ++c) {
    for (std::size_t d = 0; d < out.size(); ++d) out[d] += projected[c] * components[c][d];
  }
  return out;
}

PcaModel pca_fit(const Matrix& data, std::size_t k) {
  if (data.size() < 2) throw std::invalid_argument("pca_fit needs at least 2 rows");
  const std::size_t cols = data.front().size();
  if (cols == 0) throw std::invalid_argument("pca_fit needs at least 1 column");
  if (k < 1 || k > cols) throw std::invalid_argument("pca_fit: k must be in [1, columns]");
  for (const auto& row : data) {
    if (row.size() != cols) throw DimensionError("pca_fit: rows differ in length");
  }

  PcaModel model;
  model.mean.assign(cols, 0.0);
  for (const auto& row : data) {
    for (std::size_t d = 0; d < cols; ++d) model.mean[d] += row[d];
  }
  for (double& m : model.mean) m /= static_cast<double>(data.size());

  Matrix cov(cols, std::vector<double>(cols, 0.0));
  std::vector<double> centered(cols);
  for (const auto& row : data) {
    for (std::size_t d = 0; d < cols; ++d) centered[d] = row[d] - model.mean[d];
    for (std::size_t i = 0; i < cols; ++i) {
      for (std::size_t j = i; j < cols; ++j) cov[i][j] += centered[i] * centered[j];
    }
  }
  const double denom = static_cast<double>(data.size() - 1);
  for (std::size_t i = 0; i < cols; ++i) {
    for (std::size_t j = i; j < cols; ++j) {
      cov[i][j] /= denom;
      cov[j][i] = cov[i][j];
    }
  }
  for (std::size_t i = 0; i < cols; ++i) model.total_variance += cov[i][i];

  if (!(model.total_variance > 0.0)) {
    model.degenerate = true;
    model.total_variance = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<double> e(cols, 0.0);
      e[c] = 1.0;
      model.components.push_back(std::move(e));
      model.explained_variance.push_back(0.0);
    }
    return model;
  }

  SymmetricEigen eig = jacobi_eigen(std::move(cov));
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> comp = std::move(eig.eigenvectors[c]);
    std::size_t arg = 0;
    for (std::size_t d = 1; d < cols; ++d) {
      if (std::abs(comp[d]) > std::abs(comp[arg])) arg = d;
    }
    if (comp[arg] < 0) {
      for (double& x : comp) x = -x;
    }
    model.components.push_back(std::move(comp));
    model.explained_variance.push_back(std::max(eig.eigenvalues[c], 0.0) /
                                       model.total_variance);
  }
  return model;
}

namespace {

void check_records(const std::vector<TrajectoryRecord>& records, TrajectoryFamily family) {
  if (records.empty()) throw std::invalid_argument("average_trajectories: no records");
  const std::size_t steps = records.front().steps();
  const std::size_t dim = records.front().family(family).empty()
                              ? 0
                              : records.front().family(family).front().size();
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rows = records[r].family(family);
    if (rows.size() != steps) {
      throw DimensionError("trajectory " + std::to_string(r) + " has " +
                           std::to_string(rows.size()) + " steps, expected " +
                           std::to_string(steps));
    }
    for (const auto& row : rows) {
      if (row.size() != dim) {
        throw DimensionError("trajectory " + std::to_string(r) + " has dimension " +
                             std::to_string(row.size()) + ", expected " + std::to_string(dim));
      }
    }
  }
  if (steps == 0) throw std::invalid_argument("average_trajectories: empty trajectories");
}

PcaModel fit_pooled(const std::vector<TrajectoryRecord>& records, TrajectoryFamily family) {
  Matrix pooled;
  for (const auto& r : records) {
    const auto& rows = r.family(family);
    pooled.insert(pooled.end(), rows.begin(), rows.end());
  }
  const std::size_t k = std::min<std::size_t>(2, pooled.front().size());
  return pca_fit(pooled, k);
}

std::vector<ProjectedPoint> average_projected(const std::vector<const TrajectoryRecord*>& group,
                                              TrajectoryFamily family, const PcaModel& pca) {
  const std::size_t steps = group.front()->steps();
  std::vector<ProjectedPoint> out(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    double f1 = 0.0, f2 = 0.0;
    for (const TrajectoryRecord* r : group) {
      const auto p = pca.project(r->family(family)[t]);
      f1 += p[0];
      if (p.size() > 1) f2 += p[1];
    }
    const double n = static_cast<double>(group.size());
    out[t] = {f1 / n, f2 / n, t};
  }
  return out;
}

}  // namespace

std::vector<ProjectedPoint> average_trajectories(const std::vector<TrajectoryRecord>& records,
                                                 TrajectoryFamily family) {
  check_records(records, family);
  const PcaModel pca = fit_pooled(records, family);
  std::vector<const TrajectoryRecord*> group;
  for (const auto& r : records) group.push_back(&r);
  return average_projected(group, family, pca);
}

std::vector<LabeledTrajectory> average_trajectories_by_label(
    const std::vector<TrajectoryRecord>& records, TrajectoryFamily family) {
  check_records(records, family);
  const PcaModel pca = fit_pooled(records, family);
  std::vector<std::string> labels;
  for (const auto& r : records) {
    if (std::find(labels.begin(), labels.end(), r.label) == labels.end()) {
      labels.push_back(r.label);
    }
  }
  std::vector<LabeledTrajectory> out;
  for (const auto& label : labels) {
    std::vector<const TrajectoryRecord*> group;
    for (const auto& r : records) {
      if (r.label == label) group.push_back(&r);
    }
    out.push_back({label, average_projected(group, family, pca)});
  }
  return out;
}

double bounding_box_area(const std::vector<ProjectedPoint>& points) {
  if (points.empty()) return 0.0;
  double x0 = points.front().f1, x1 = x0, y0 = points.front().f2, y1 = y0;
  for (const auto& p : points) {
    x0 = std::min(x0, p.f1);
    x1 = std::max(x1, p.f1);
    y0 = std::min(y0, p.f2);
    y1 = std::max(y1, p.f2);
  }
  return (x1 - x0) * (y1 - y0);
}

std::string projected_to_csv(const std::vector<LabeledTrajectory>& groups) {
  std::string out = "f1,f2,step,label\n";
  for (const auto& g : groups) {
    for (const auto& p : g.points) {
      out += fmt(p.f1) + ',' + fmt(p.f2) + ',' + std::to_string(p.step) + ',' + g.label + '\n';
    }
  }
  return out;
}

std::vector<SweepRow> window_sweep(const std::vector<Genome>& genomes, const EvalSpec& spec,
                                   const std::vector<std::size_t>& windows, int threads) {
  if (genomes.empty()) throw std::invalid_argument("window_sweep: no genomes");
  if (windows.empty()) throw std::invalid_argument("window_sweep: no memory windows");
  for (std::size_t w : windows) {
    if (w < 1) throw std::invalid_argument("window_sweep: memory windows must be >= 1");
  }
  const Topology& topo = genomes.front().topology();
  for (const Genome& g : genomes) {
    if (g.scheme() != Scheme::kNeuronCentric) {
      throw SchemeError("window_sweep expects neuron_centric genomes, got " +
                        std::string(to_string(g.scheme())));
    }
  }

  EvalSpec zero = spec;
  zero.init = WeightInit::zeros();

  // Job j < G: reference fitness of genome j; afterwards (genome, window).
  const std::size_t G = genomes.size();
  const std::size_t jobs = G + G * windows.size();
  std::vector<double> results(jobs, 0.0);
  parallel_for(jobs, threads, [&](std::size_t j) {
    if (j < G) {
      results[j] = evaluate(genomes[j], zero);
      return;
    }
    const std::size_t g = (j - G) / windows.size();
    const std::size_t w = (j - G) % windows.size();
    EvalSpec ws = zero;
    ws.memory_window = windows[w];
    results[j] = evaluate(genomes[g].with_scheme(Scheme::kWeightlessNeuronCentric), ws);
  });

  std::vector<SweepRow> rows;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    SweepRow row;
    row.memory_window = windows[w];
    row.memory_ratio = static_cast<double>(windows[w] * topo.neuron_count()) /
                       static_cast<double>(topo.synapse_count());
    std::vector<double> defined;
    for (std::size_t g = 0; g < G; ++g) {
      const double reference = results[g];
      if (reference > 0.0) {
        const double ratio = results[G + g * windows.size() + w] / reference;
        row.f_ratios.emplace_back(ratio);
        defined.push_back(ratio);
      } else {
        row.f_ratios.emplace_back(std::nullopt);
      }
    }
    row.defined = defined.size();
    if (!defined.empty()) {
      double sum = 0.0;
      for (double r : defined) sum += r;
      row.f_ratio_mean = sum / static_cast<double>(defined.size());
      double sq = 0.0;
      for (double r : defined) sq += (r - row.f_ratio_mean) * (r - row.f_ratio_mean);
      row.f_ratio_std = std::sqrt(sq / static_cast<double>(defined.size()));
      std::sort(defined.begin(), defined.end());
      const std::size_t n = defined.size();
      row.f_ratio_median = n % 2 ? defined[n / 2] : 0.5 * (defined[n / 2 - 1] + defined[n / 2]);
    } else {
      row.f_ratio_mean = row.f_ratio_std = row.f_ratio_median =
          std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "memory_window,f_ratio_mean,f_ratio_std,f_ratio_median,defined,genomes,memory_ratio\n";
  for (const auto& r : rows) {
    auto cell = [&](double v) { return r.defined ? fmt(v) : std::string("undefined"); };
    out += std::to_string(r.memory_window) + ',' + cell(r.f_ratio_mean) + ',' +
           cell(r.f_ratio_std) + ',' + cell(r.f_ratio_median) + ',' +
           std::to_string(r.defined) + ',' + std::to_string(r.f_ratios.size()) + ',' +
           fmt(r.memory_ratio) + '\n';
  }
  return out;
}

std::vector<ScalingRow> scaling_table(int max_hidden, const std::vector<int>& layers) {
  if (max_hidden < 1) throw std::invalid_argument("scaling_table: max_hidden must be >= 1");
  std::vector<ScalingRow> rows;
  for (int l : layers) {
    if (l < 1) throw std::invalid_argument("scaling_table: hidden layer counts must be >= 1");
    for (int w = 1; w <= max_hidden; ++w) {
      std::vector<int> sizes{1};
      sizes.insert(sizes.end(), l, w);
      sizes.push_back(1);
      const Topology topo(std::move(sizes));
      rows.push_back({l, w, 5 * topo.synapse_count(), 5 * topo.neuron_count()});
    }
  }
  return rows;
}

std::string scaling_to_csv(const std::vector<ScalingRow>& rows) {
  std::string out = "hidden_layers,width,hl,nchl\n";
  for (const auto& r : rows) {
    out += std::to_string(r.hidden_layers) + ',' + std::to_string(r.width) + ',' +
           std::to_string(r.synaptic) + ',' + std::to_string(r.neuron_centric) + '\n';
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope needs two equal-length series of >= 2 points");
  }
  double mx = 0, my = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace nchl
