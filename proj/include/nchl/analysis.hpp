#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nchl/envs.hpp"
#include "nchl/plasticity.hpp"
#include "nchl/trajectory.hpp"

namespace nchl {

using Matrix = std::vector<std::vector<double>>;  // row-major, one sample per row

// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
// Eigenvalues come back in descending order; eigenvectors[k] pairs with
// eigenvalues[k].
struct SymmetricEigen {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
  int sweeps = 0;
};
SymmetricEigen jacobi_eigen(Matrix a, double tolerance = 1e-12, int max_sweeps = 100);

struct PcaModel {
  std::vector<double> mean;
  Matrix components;                     // k orthonormal rows
  std::vector<double> explained_variance;  // fraction of total variance per component
  double total_variance = 0.0;
  // All rows identical: variance is zero and the basis is arbitrary.
  bool degenerate = false;

  std::vector<double> project(const std::vector<double>& row) const;
  std::vector<double> reconstruct(const std::vector<double>& projected) const;
};

// Top-k principal components of mean-centred data. Each component is
// oriented so its largest-magnitude coordinate is positive.
PcaModel pca_fit(const Matrix& data, std::size_t k);

struct ProjectedPoint {
  double f1 = 0.0;
  double f2 = 0.0;
  std::size_t step = 0;
};

// Fits one 2-component PCA on the pooled family rows of `records`, projects
// every record and averages the projections per step.
std::vector<ProjectedPoint> average_trajectories(const std::vector<TrajectoryRecord>& records,
                                                 TrajectoryFamily family);

struct LabeledTrajectory {
  std::string label;
  std::vector<ProjectedPoint> points;
};

// As average_trajectories, with one PCA fitted over all groups so the
// averaged trajectories share axes. Groups keep first-appearance order.
std::vector<LabeledTrajectory> average_trajectories_by_label(
    const std::vector<TrajectoryRecord>& records, TrajectoryFamily family);

double bounding_box_area(const std::vector<ProjectedPoint>& points);

std::string projected_to_csv(const std::vector<LabeledTrajectory>& groups);

struct SweepRow {
  std::size_t memory_window = 0;
  double f_ratio_mean = 0.0;
  double f_ratio_std = 0.0;
  double f_ratio_median = 0.0;
  std::size_t defined = 0;  // genomes with positive NcHL fitness
  double memory_ratio = 0.0;  // M_w * N / W
  std::vector<std::optional<double>> f_ratios;  // per genome; empty when undefined
};

// For each window, fitness of the weightless model relative to the
// weight-storing model for the same zero-initialised neuron-centric genome.
std::vector<SweepRow> window_sweep(const std::vector<Genome>& genomes, const EvalSpec& spec,
                                   const std::vector<std::size_t>& windows, int threads = 1);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

struct ScalingRow {
  int hidden_layers = 0;
  int width = 0;
  std::size_t synaptic = 0;        // 5 * synapses
  std::size_t neuron_centric = 0;  // 5 * neurons
};

// Parameter counts for a one-input, one-output network with `layers`
// hidden layers of `width` neurons, for widths 1..max_hidden.
std::vector<ScalingRow> scaling_table(int max_hidden, const std::vector<int>& layers);

std::string scaling_to_csv(const std::vector<ScalingRow>& rows);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nchl
