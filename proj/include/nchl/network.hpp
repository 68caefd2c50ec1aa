#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nchl {

// Layer sizes of a dense, bias-free feed-forward network: input, hidden...,
// output. Neurons are numbered globally layer by layer starting at the input.
class Topology {
 public:
  Topology() = default;
  explicit Topology(std::vector<int> layer_sizes);

  // Parses "28,256,128,8".
  static Topology parse(std::string_view text);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  std::size_t layer_count() const { return sizes_.size(); }
  int layer_size(std::size_t k) const { return sizes_[k]; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }

  // W and N.
  std::size_t synapse_count() const { return synapses_; }
  std::size_t neuron_count() const { return neurons_; }

  // Global index of the first neuron of layer k.
  std::size_t neuron_offset(std::size_t k) const { return neuron_offsets_[k]; }
  // Index of the first synapse of weight layer k (between layer k and k+1).
  std::size_t synapse_offset(std::size_t k) const { return synapse_offsets_[k]; }

  std::string to_string() const;

  friend bool operator==(const Topology& a, const Topology& b) {
    return a.sizes_ == b.sizes_;
  }

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> neuron_offsets_;
  std::vector<std::size_t> synapse_offsets_;
  std::size_t synapses_ = 0;
  std::size_t neurons_ = 0;
};

struct WeightInit {
  enum class Mode { kZeros, kUniform };
  Mode mode = Mode::kUniform;
  double low = -0.1;
  double high = 0.1;

  static WeightInit zeros() { return {Mode::kZeros, 0.0, 0.0}; }
  static WeightInit uniform(double lo, double hi) { return {Mode::kUniform, lo, hi}; }
};

// Dense tanh network whose weights are mutated in place by a plasticity
// rule. Weight layer k is stored row-major as [pre * n_post + post].
class PlasticNetwork {
 public:
  explicit PlasticNetwork(Topology topology);

  // Deterministic given `seed`. Throws on non-finite or inverted bounds.
  void init_weights(const WeightInit& init, std::uint64_t seed);

  // Propagates `input` layer by layer (s_j = sum_i w_ij a_i, a_j = tanh(s_j))
  // and returns the output layer activations. Input neurons keep the raw
  // input as their activation.
  std::span<const double> forward(std::span<const double> input);

  const Topology& topology() const { return topology_; }

  std::span<double> layer_weights(std::size_t k) { return weights_[k]; }
  std::span<const double> layer_weights(std::size_t k) const { return weights_[k]; }
  const std::vector<std::vector<double>>& weights() const { return weights_; }
  double weight(std::size_t k, std::size_t pre, std::size_t post) const {
    return weights_[k][pre * topology_.layer_size(k + 1) + post];
  }

  // Post-activation values of every neuron from the last forward pass.
  std::span<const double> activations() const { return activations_; }
  std::span<const double> layer_activations(std::size_t k) const;
  // Pre-activation sums of every non-input neuron.
  std::span<const double> presynaptic_sums() const { return sums_; }
  std::span<const double> output_presynaptic_sums() const;
  std::span<const double> output() const { return layer_activations(topology_.layer_count() - 1); }

  bool has_activity() const { return has_activity_; }

 private:
  Topology topology_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> activations_;
  std::vector<double> sums_;
  bool has_activity_ = false;
};

// Validates an input vector against the topology; shared by every forward
// implementation.
void check_input(const Topology& topology, std::span<const double> input);

}  // namespace nchl
