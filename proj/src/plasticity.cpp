#include "nchl/plasticity.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "nchl/errors.hpp"

namespace nchl {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kSynaptic: return "synaptic";
    case Scheme::kNeuronCentric: return "neuron_centric";
    case Scheme::kWeightlessNeuronCentric: return "weightless_neuron_centric";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "synaptic" || text == "hl") return Scheme::kSynaptic;
  if (text == "neuron_centric" || text == "nchl" || text == "neuron") {
    return Scheme::kNeuronCentric;
  }
  if (text == "weightless_neuron_centric" || text == "wnchl" || text == "weightless") {
    return Scheme::kWeightlessNeuronCentric;
  }
  throw std::invalid_argument("unknown scheme '" + std::string(text) + "'");
}

namespace {

// Parameters stored per neuron for the neuron-centric layouts.
std::size_t neuron_slots(bool is_input, const EtaMode& eta) {
  if (eta.evolved) return 5;
  return is_input ? 2 : 4;
}

}  // namespace

std::size_t rule_param_count(Scheme scheme, const Topology& topology, const EtaMode& eta) {
  if (scheme == Scheme::kSynaptic) {
    return topology.synapse_count() * (eta.evolved ? 5 : 4);
  }
  const std::size_t inputs = topology.input_size();
  return inputs * neuron_slots(true, eta) +
         (topology.neuron_count() - inputs) * neuron_slots(false, eta);
}

Genome::Genome(Scheme scheme, EtaMode eta, Topology topology, std::vector<double> values,
               std::uint64_t seed)
    : scheme_(scheme),
      eta_(eta),
      topology_(std::move(topology)),
      values_(std::move(values)),
      seed_(seed) {
  const std::size_t expected = rule_param_count(scheme_, topology_, eta_);
  if (values_.size() != expected) {
    throw DimensionError("genome for " + std::string(to_string(scheme_)) + " on " +
                         topology_.to_string() + " needs " + std::to_string(expected) +
                         " values, got " + std::to_string(values_.size()));
  }
  if (!eta_.evolved && !std::isfinite(eta_.value)) {
    throw std::invalid_argument("fixed learning rate must be finite");
  }
}

Genome Genome::with_scheme(Scheme scheme) const {
  if (is_neuron_centric(scheme) != is_neuron_centric(scheme_)) {
    throw SchemeError("cannot reinterpret a " + std::string(to_string(scheme_)) +
                      " genome as " + std::string(to_string(scheme)));
  }
  return Genome(scheme, eta_, topology_, values_, seed_);
}

Genome Genome::with_values(std::vector<double> values) const {
  return Genome(scheme_, eta_, topology_, std::move(values), seed_);
}

SynapticParams decode_synaptic(const Genome& genome) {
  if (genome.scheme() != Scheme::kSynaptic) {
    throw SchemeError("expected a synaptic genome, got " +
                      std::string(to_string(genome.scheme())));
  }
  const Topology& topo = genome.topology();
  const auto& v = genome.values();
  const bool evolved = genome.eta().evolved;
  SynapticParams params{topo, {}};
  std::size_t p = 0;
  for (std::size_t k = 0; k + 1 < topo.layer_count(); ++k) {
    auto& layer = params.layers.emplace_back(
        static_cast<std::size_t>(topo.layer_size(k)) * topo.layer_size(k + 1));
    for (SynapseRule& r : layer) {
      r.a = v[p++];
      r.b = v[p++];
      r.c = v[p++];
      r.d = v[p++];
      r.eta = evolved ? v[p++] : genome.eta().value;
    }
  }
  return params;
}

NeuronParams decode_neuron_centric(const Genome& genome) {
  if (!is_neuron_centric(genome.scheme())) {
    throw SchemeError("expected a neuron-centric genome, got " +
                      std::string(to_string(genome.scheme())));
  }
  const Topology& topo = genome.topology();
  const auto& v = genome.values();
  const EtaMode& eta = genome.eta();
  NeuronParams params{topo, std::vector<NeuronRule>(topo.neuron_count())};
  const std::size_t inputs = topo.input_size();
  std::size_t p = 0;
  for (std::size_t n = 0; n < params.neurons.size(); ++n) {
    NeuronRule& r = params.neurons[n];
    if (eta.evolved) {
      r = {v[p], v[p + 1], v[p + 2], v[p + 3], v[p + 4]};
      p += 5;
    } else if (n < inputs) {
      // Input neurons are never post-synaptic: B is unused and D drops out
      // of the bias product, leaving D_j alone.
      r = {v[p], 0.0, v[p + 1], 1.0, eta.value};
      p += 2;
    } else {
      r = {v[p], v[p + 1], v[p + 2], v[p + 3], eta.value};
      p += 4;
    }
  }
  return params;
}

Genome encode(const SynapticParams& params, EtaMode eta, std::uint64_t seed) {
  std::vector<double> v;
  v.reserve(rule_param_count(Scheme::kSynaptic, params.topology, eta));
  for (const auto& layer : params.layers) {
    for (const SynapseRule& r : layer) {
      v.insert(v.end(), {r.a, r.b, r.c, r.d});
      if (eta.evolved) v.push_back(r.eta);
    }
  }
  return Genome(Scheme::kSynaptic, eta, params.topology, std::move(v), seed);
}

Genome encode(const NeuronParams& params, EtaMode eta, Scheme scheme, std::uint64_t seed) {
  if (!is_neuron_centric(scheme)) throw SchemeError("encode: scheme must be neuron-centric");
  std::vector<double> v;
  v.reserve(rule_param_count(scheme, params.topology, eta));
  const std::size_t inputs = params.topology.input_size();
  for (std::size_t n = 0; n < params.neurons.size(); ++n) {
    const NeuronRule& r = params.neurons[n];
    if (eta.evolved) {
      v.insert(v.end(), {r.a, r.b, r.c, r.d, r.eta});
    } else if (n < inputs) {
      v.insert(v.end(), {r.a, r.c});
    } else {
      v.insert(v.end(), {r.a, r.b, r.c, r.d});
    }
  }
  return Genome(scheme, eta, params.topology, std::move(v), seed);
}

Genome lift_nchl_to_hl(const Genome& genome) {
  if (!genome.eta().evolved) {
    throw std::invalid_argument(
        "lift_nchl_to_hl requires an evolved learning rate; the fixed-eta input "
        "layout has no unique synaptic equivalent");
  }
  const NeuronParams np = decode_neuron_centric(genome);
  const Topology& topo = np.topology;
  SynapticParams sp{topo, {}};
  for (std::size_t k = 0; k + 1 < topo.layer_count(); ++k) {
    const std::size_t n_pre = topo.layer_size(k);
    const std::size_t n_post = topo.layer_size(k + 1);
    auto& layer = sp.layers.emplace_back(n_pre * n_post);
    for (std::size_t i = 0; i < n_pre; ++i) {
      const NeuronRule& pre = np.neurons[topo.neuron_offset(k) + i];
      for (std::size_t j = 0; j < n_post; ++j) {
        const NeuronRule& post = np.neurons[topo.neuron_offset(k + 1) + j];
        layer[i * n_post + j] = {pre.a, post.b, pre.c * post.c, pre.d * post.d,
                                 (pre.eta + post.eta) / 2.0};
      }
    }
  }
  return encode(sp, EtaMode::evolving(), genome.seed());
}

Genome random_rule_genome(Scheme scheme, const Topology& topology, EtaMode eta,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(rule_param_count(scheme, topology, eta));
  for (double& x : v) x = dist(rng);
  return Genome(scheme, eta, topology, std::move(v), seed);
}

HebbianRule::HebbianRule(const Genome& genome) : scheme_(genome.scheme()) {
  switch (scheme_) {
    case Scheme::kSynaptic:
      params_ = decode_synaptic(genome);
      break;
    case Scheme::kNeuronCentric:
      params_ = decode_neuron_centric(genome);
      break;
    case Scheme::kWeightlessNeuronCentric:
      throw SchemeError(
          "weightless genomes have no stored weights to update; use WeightlessNetwork");
  }
}

const Topology& HebbianRule::topology() const {
  return std::visit([](const auto& p) -> const Topology& { return p.topology; }, params_);
}

void HebbianRule::apply(PlasticNetwork& net) const {
  const Topology& topo = net.topology();
  if (!(topo == topology())) {
    throw DimensionError("rule topology " + topology().to_string() +
                         " does not match network " + topo.to_string());
  }
  if (!net.has_activity()) {
    throw std::logic_error("apply_hebbian_update before any forward pass");
  }
  const auto act = net.activations();
  for (std::size_t k = 0; k + 1 < topo.layer_count(); ++k) {
    const std::size_t n_pre = topo.layer_size(k);
    const std::size_t n_post = topo.layer_size(k + 1);
    const double* pre_act = act.data() + topo.neuron_offset(k);
    const double* post_act = act.data() + topo.neuron_offset(k + 1);
    std::span<double> w = net.layer_weights(k);
    if (const auto* sp = std::get_if<SynapticParams>(&params_)) {
      const auto& rules = sp->layers[k];
      for (std::size_t i = 0; i < n_pre; ++i) {
        for (std::size_t j = 0; j < n_post; ++j) {
          const std::size_t s = i * n_post + j;
          w[s] = w[s] + delta_synaptic(rules[s], pre_act[i], post_act[j]);
        }
      }
    } else {
      const auto& neurons = std::get<NeuronParams>(params_).neurons;
      const NeuronRule* pre_rule = neurons.data() + topo.neuron_offset(k);
      const NeuronRule* post_rule = neurons.data() + topo.neuron_offset(k + 1);
      for (std::size_t i = 0; i < n_pre; ++i) {
        for (std::size_t j = 0; j < n_post; ++j) {
          const std::size_t s = i * n_post + j;
          w[s] = w[s] + delta_neuron_centric(pre_rule[i], post_rule[j], pre_act[i],
                                             post_act[j]);
        }
      }
    }
  }
}

void apply_hebbian_update(PlasticNetwork& net, const HebbianRule& rule) { rule.apply(net); }

void apply_hebbian_update(PlasticNetwork& net, const Genome& genome) {
  HebbianRule(genome).apply(net);
}

WeightlessState::WeightlessState(std::size_t neuron_count, std::size_t memory_window)
    : neurons_(neuron_count), capacity_(memory_window) {
  if (memory_window < 1) throw std::invalid_argument("memory window must be >= 1");
  buffer_.assign(neurons_ * capacity_, 0.0);
}

std::span<const double> WeightlessState::at(std::size_t t) const {
  if (t >= size_) throw std::out_of_range("window index out of range");
  const std::size_t slot = (head_ + t) % capacity_;
  return std::span<const double>(buffer_).subspan(slot * neurons_, neurons_);
}

void WeightlessState::push(std::span<const double> activations) {
  if (activations.size() != neurons_) {
    throw DimensionError("activation vector size does not match the window");
  }
  std::size_t slot;
  if (size_ < capacity_) {
    slot = (head_ + size_) % capacity_;
    ++size_;
  } else {
    slot = head_;
    head_ = (head_ + 1) % capacity_;
  }
  std::copy(activations.begin(), activations.end(), buffer_.begin() + slot * neurons_);
  ++steps_;
}

void WeightlessState::clear() {
  head_ = 0;
  size_ = 0;
  steps_ = 0;
}

namespace {

double window_weight(const WeightlessState& state, const NeuronRule& pre_rule,
                     const NeuronRule& post_rule, std::size_t pre, std::size_t post) {
  double w = 0.0;
  for (std::size_t t = 0; t < state.size(); ++t) {
    const auto a = state.at(t);
    w = w + delta_neuron_centric(pre_rule, post_rule, a[pre], a[post]);
  }
  return w;
}

}  // namespace

std::vector<std::vector<double>> weightless_weights(const WeightlessState& state,
                                                    const Genome& genome) {
  if (genome.scheme() != Scheme::kWeightlessNeuronCentric) {
    throw SchemeError("weightless_weights requires a weightless_neuron_centric genome");
  }
  const NeuronParams np = decode_neuron_centric(genome);
  const Topology& topo = np.topology;
  if (state.neuron_count() != topo.neuron_count()) {
    throw DimensionError("window neuron count does not match genome topology");
  }
  std::vector<std::vector<double>> weights;
  for (std::size_t k = 0; k + 1 < topo.layer_count(); ++k) {
    const std::size_t n_pre = topo.layer_size(k);
    const std::size_t n_post = topo.layer_size(k + 1);
    auto& layer = weights.emplace_back(n_pre * n_post, 0.0);
    for (std::size_t i = 0; i < n_pre; ++i) {
      const std::size_t gi = topo.neuron_offset(k) + i;
      for (std::size_t j = 0; j < n_post; ++j) {
        const std::size_t gj = topo.neuron_offset(k + 1) + j;
        layer[i * n_post + j] = window_weight(state, np.neurons[gi], np.neurons[gj], gi, gj);
      }
    }
  }
  return weights;
}

WeightlessNetwork::WeightlessNetwork(const Genome& genome, std::size_t memory_window)
    : params_(genome.scheme() == Scheme::kWeightlessNeuronCentric
                  ? decode_neuron_centric(genome)
                  : throw SchemeError(
                        "WeightlessNetwork requires a weightless_neuron_centric genome")),
      state_(params_.topology.neuron_count(), memory_window),
      activations_(params_.topology.neuron_count(), 0.0),
      sums_(params_.topology.neuron_count() - params_.topology.input_size(), 0.0) {}

double WeightlessNetwork::reconstruct(std::size_t pre, std::size_t post) const {
  return window_weight(state_, params_.neurons[pre], params_.neurons[post], pre, post);
}

std::span<const double> WeightlessNetwork::step(std::span<const double> input) {
  const Topology& topo = params_.topology;
  check_input(topo, input);
  std::copy(input.begin(), input.end(), activations_.begin());
  const std::size_t inputs = topo.input_size();
  for (std::size_t k = 0; k + 1 < topo.layer_count(); ++k) {
    const std::size_t n_pre = topo.layer_size(k);
    const std::size_t n_post = topo.layer_size(k + 1);
    const std::size_t pre0 = topo.neuron_offset(k);
    const std::size_t post0 = topo.neuron_offset(k + 1);
    double* sums = sums_.data() + (post0 - inputs);
    std::fill(sums, sums + n_post, 0.0);
    // Same accumulation order as PlasticNetwork::forward.
    for (std::size_t i = 0; i < n_pre; ++i) {
      const double a = activations_[pre0 + i];
      for (std::size_t j = 0; j < n_post; ++j) {
        sums[j] += reconstruct(pre0 + i, post0 + j) * a;
      }
    }
    for (std::size_t j = 0; j < n_post; ++j) activations_[post0 + j] = std::tanh(sums[j]);
  }
  state_.push(activations_);
  return output();
}

std::span<const double> WeightlessNetwork::output() const {
  const Topology& topo = params_.topology;
  return std::span<const double>(activations_)
      .subspan(topo.neuron_offset(topo.layer_count() - 1), topo.output_size());
}

std::span<const double> WeightlessNetwork::output_presynaptic_sums() const {
  const Topology& topo = params_.topology;
  return std::span<const double>(sums_).subspan(
      topo.neuron_offset(topo.layer_count() - 1) - topo.input_size(), topo.output_size());
}

std::span<const double> step_weightless(WeightlessNetwork& net,
                                        std::span<const double> input) {
  return net.step(input);
}

ParamCount param_count(Scheme scheme, const Topology& topology, const EtaMode& eta) {
  ParamCount c;
  c.synaptic = rule_param_count(Scheme::kSynaptic, topology, eta);
  c.neuron_centric = rule_param_count(Scheme::kNeuronCentric, topology, eta);
  c.total = scheme == Scheme::kSynaptic ? c.synaptic : c.neuron_centric;
  c.ratio = static_cast<double>((100 * c.synaptic) / c.neuron_centric) / 100.0;
  return c;
}

MemoryFootprint memory_footprint(Scheme scheme, const Topology& topology,
                                 const EtaMode& eta, std::size_t memory_window) {
  const std::size_t rules = rule_param_count(scheme, topology, eta);
  MemoryFootprint m;
  if (scheme == Scheme::kWeightlessNeuronCentric) {
    m.values_stored = rules + topology.neuron_count() * memory_window;
  } else {
    m.values_stored =
        topology.synapse_count() + rules + (topology.neuron_count() - topology.input_size());
  }
  m.bytes_at_32bit = 4 * m.values_stored;
  return m;
}

}  // namespace nchl
