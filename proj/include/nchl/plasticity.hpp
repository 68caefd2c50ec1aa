#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nchl/network.hpp"

namespace nchl {

enum class Scheme { kSynaptic, kNeuronCentric, kWeightlessNeuronCentric };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

inline bool is_neuron_centric(Scheme s) {
  return s == Scheme::kNeuronCentric || s == Scheme::kWeightlessNeuronCentric;
}

// Learning rate handling: either one constant shared by every rule or an
// extra evolved parameter per synapse / neuron.
struct EtaMode {
  bool evolved = true;
  double value = 0.1;

  static EtaMode fixed(double eta = 0.1) { return {false, eta}; }
  static EtaMode evolving() { return {true, 0.0}; }

  friend bool operator==(const EtaMode& a, const EtaMode& b) {
    return a.evolved == b.evolved && (a.evolved || a.value == b.value);
  }
};

// Flat vector of Hebbian rule parameters. Layout:
//   synaptic:        per synapse (weight layer, pre, post order) A B C D [eta]
//   neuron-centric:  per neuron (global index) A B C D [eta]; with a fixed
//                    eta, input neurons store only A C.
class Genome {
 public:
  Genome(Scheme scheme, EtaMode eta, Topology topology, std::vector<double> values,
         std::uint64_t seed = 0);

  Scheme scheme() const { return scheme_; }
  const EtaMode& eta() const { return eta_; }
  const Topology& topology() const { return topology_; }
  const std::vector<double>& values() const { return values_; }
  std::uint64_t seed() const { return seed_; }

  // Same parameters under another scheme with an identical layout
  // (neuron-centric <-> weightless).
  Genome with_scheme(Scheme scheme) const;
  Genome with_values(std::vector<double> values) const;

 private:
  Scheme scheme_;
  EtaMode eta_;
  Topology topology_;
  std::vector<double> values_;
  std::uint64_t seed_;
};

struct SynapseRule {
  double a = 0, b = 0, c = 0, d = 0, eta = 0;
  friend bool operator==(const SynapseRule&, const SynapseRule&) = default;
};

struct NeuronRule {
  double a = 0, b = 0, c = 0, d = 0, eta = 0;
  friend bool operator==(const NeuronRule&, const NeuronRule&) = default;
};

// eta * (A a_i + B a_j + C a_i a_j + D)
inline double delta_synaptic(const SynapseRule& r, double a_i, double a_j, double eta) {
  return eta * (r.a * a_i + r.b * a_j + r.c * a_i * a_j + r.d);
}

inline double delta_synaptic(const SynapseRule& r, double a_i, double a_j) {
  return delta_synaptic(r, a_i, a_j, r.eta);
}

// ((eta_i + eta_j) / 2) * (A_i a_i + B_j a_j + C_i C_j a_i a_j + D_i D_j)
inline double delta_neuron_centric(const NeuronRule& pre, const NeuronRule& post,
                                   double a_i, double a_j) {
  const double eta = (pre.eta + post.eta) / 2.0;
  return eta * (pre.a * a_i + post.b * a_j + pre.c * post.c * a_i * a_j + pre.d * post.d);
}

// Per-synapse parameters, shaped like PlasticNetwork::weights().
struct SynapticParams {
  Topology topology;
  std::vector<std::vector<SynapseRule>> layers;
};

// Per-neuron parameters indexed by global neuron id.
struct NeuronParams {
  Topology topology;
  std::vector<NeuronRule> neurons;
};

SynapticParams decode_synaptic(const Genome& genome);
NeuronParams decode_neuron_centric(const Genome& genome);
Genome encode(const SynapticParams& params, EtaMode eta, std::uint64_t seed = 0);
Genome encode(const NeuronParams& params, EtaMode eta,
              Scheme scheme = Scheme::kNeuronCentric, std::uint64_t seed = 0);

// Expresses a neuron-centric genome (evolved eta) as the synaptic genome
// producing identical weight updates.
Genome lift_nchl_to_hl(const Genome& genome);

// Every parameter i.i.d. uniform in [-1, 1].
Genome random_rule_genome(Scheme scheme, const Topology& topology, EtaMode eta,
                          std::uint64_t seed);

// Decoded plasticity rule for the weight-storing schemes.
class HebbianRule {
 public:
  explicit HebbianRule(const Genome& genome);

  Scheme scheme() const { return scheme_; }
  const Topology& topology() const;

  // Adds the rule's delta to every weight, using the activations of the
  // last forward pass.
  void apply(PlasticNetwork& net) const;

 private:
  Scheme scheme_;
  std::variant<SynapticParams, NeuronParams> params_;
};

void apply_hebbian_update(PlasticNetwork& net, const HebbianRule& rule);
void apply_hebbian_update(PlasticNetwork& net, const Genome& genome);

// Last M_w activation vectors of every neuron, oldest first.
class WeightlessState {
 public:
  WeightlessState(std::size_t neuron_count, std::size_t memory_window);

  std::size_t memory_window() const { return capacity_; }
  std::size_t neuron_count() const { return neurons_; }
  std::size_t size() const { return size_; }
  std::uint64_t step_count() const { return steps_; }
  bool empty() const { return size_ == 0; }

  // t = 0 is the oldest retained step.
  std::span<const double> at(std::size_t t) const;
  void push(std::span<const double> activations);
  void clear();

 private:
  std::size_t neurons_;
  std::size_t capacity_;
  std::vector<double> buffer_;
  std::size_t head_ = 0;  // slot of the oldest entry
  std::size_t size_ = 0;
  std::uint64_t steps_ = 0;
};

// Reconstructs every weight as the chronological sum of neuron-centric
// deltas over the window. An empty window yields all-zero weights.
std::vector<std::vector<double>> weightless_weights(const WeightlessState& state,
                                                    const Genome& genome);

// Network that stores no weights: each step recomputes them from the
// activation window, runs the forward pass, then records the new activations.
class WeightlessNetwork {
 public:
  WeightlessNetwork(const Genome& genome, std::size_t memory_window);

  std::span<const double> step(std::span<const double> input);

  const Topology& topology() const { return params_.topology; }
  const WeightlessState& state() const { return state_; }
  std::span<const double> activations() const { return activations_; }
  std::span<const double> output() const;
  std::span<const double> output_presynaptic_sums() const;

 private:
  double reconstruct(std::size_t pre, std::size_t post) const;

  NeuronParams params_;
  WeightlessState state_;
  std::vector<double> activations_;
  std::vector<double> sums_;
};

std::span<const double> step_weightless(WeightlessNetwork& net,
                                        std::span<const double> input);

struct ParamCount {
  std::size_t total = 0;           // for the requested scheme
  std::size_t synaptic = 0;        // HL
  std::size_t neuron_centric = 0;  // NcHL / WNcHL
  // synaptic / neuron_centric, truncated to two decimals for reporting.
  double ratio = 0.0;
};

std::size_t rule_param_count(Scheme scheme, const Topology& topology, const EtaMode& eta);
ParamCount param_count(Scheme scheme, const Topology& topology, const EtaMode& eta);

struct MemoryFootprint {
  std::size_t values_stored = 0;
  std::size_t bytes_at_32bit = 0;
};

// Values a deployed controller must keep: weights, rule parameters and
// activations (weightless: rule parameters plus the activation window).
MemoryFootprint memory_footprint(Scheme scheme, const Topology& topology,
                                 const EtaMode& eta, std::size_t memory_window);

}  // namespace nchl
