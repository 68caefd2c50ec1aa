#include "nchl/network.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "nchl/errors.hpp"

namespace nchl {

Topology::Topology(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) {
    throw std::invalid_argument("topology needs at least 2 layers");
  }
  for (int s : sizes_) {
    if (s < 1) throw std::invalid_argument("topology layer sizes must be >= 1");
  }
  neuron_offsets_.reserve(sizes_.size());
  for (int s : sizes_) {
    neuron_offsets_.push_back(neurons_);
    neurons_ += static_cast<std::size_t>(s);
  }
  for (std::size_t k = 0; k + 1 < sizes_.size(); ++k) {
    synapse_offsets_.push_back(synapses_);
    synapses_ += static_cast<std::size_t>(sizes_[k]) * static_cast<std::size_t>(sizes_[k + 1]);
  }
}

Topology Topology::parse(std::string_view text) {
  std::vector<int> sizes;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view token = text.substr(pos, comma - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    int value = 0;
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc{} || end != token.data() + token.size()) {
      throw std::invalid_argument("malformed topology '" + std::string(text) +
                                  "': expected comma-separated positive integers");
    }
    sizes.push_back(value);
    pos = comma + 1;
  }
  return Topology(std::move(sizes));
}

std::string Topology::to_string() const {
  std::ostringstream out;
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    if (k) out << ',';
    out << sizes_[k];
  }
  return out.str();
}

void check_input(const Topology& topology, std::span<const double> input) {
  if (input.size() != static_cast<std::size_t>(topology.input_size())) {
    throw DimensionError("input has " + std::to_string(input.size()) +
                         " values, network expects " +
                         std::to_string(topology.input_size()));
  }
  for (double v : input) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite network input");
  }
}

PlasticNetwork::PlasticNetwork(Topology topology)
    : topology_(std::move(topology)),
      activations_(topology_.neuron_count(), 0.0),
      sums_(topology_.neuron_count() - topology_.input_size(), 0.0) {
  for (std::size_t k = 0; k + 1 < topology_.layer_count(); ++k) {
    weights_.emplace_back(static_cast<std::size_t>(topology_.layer_size(k)) *
                              topology_.layer_size(k + 1),
                          0.0);
  }
}

void PlasticNetwork::init_weights(const WeightInit& init, std::uint64_t seed) {
  if (init.mode == WeightInit::Mode::kZeros) {
    for (auto& layer : weights_) std::fill(layer.begin(), layer.end(), 0.0);
    return;
  }
  if (!std::isfinite(init.low) || !std::isfinite(init.high)) {
    throw std::invalid_argument("weight init bounds must be finite");
  }
  if (!(init.low < init.high)) {
    throw std::invalid_argument("weight init requires low < high");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(init.low, init.high);
  for (auto& layer : weights_) {
    for (double& w : layer) w = dist(rng);
  }
}

std::span<const double> PlasticNetwork::forward(std::span<const double> input) {
  check_input(topology_, input);
  std::copy(input.begin(), input.end(), activations_.begin());
  const std::size_t inputs = topology_.input_size();
  for (std::size_t k = 0; k + 1 < topology_.layer_count(); ++k) {
    const std::size_t n_pre = topology_.layer_size(k);
    const std::size_t n_post = topology_.layer_size(k + 1);
    const double* pre = activations_.data() + topology_.neuron_offset(k);
    double* post = activations_.data() + topology_.neuron_offset(k + 1);
    double* sums = sums_.data() + (topology_.neuron_offset(k + 1) - inputs);
    std::fill(sums, sums + n_post, 0.0);
    const double* w = weights_[k].data();
    for (std::size_t i = 0; i < n_pre; ++i) {
      const double a = pre[i];
      const double* row = w + i * n_post;
      for (std::size_t j = 0; j < n_post; ++j) sums[j] += row[j] * a;
    }
    for (std::size_t j = 0; j < n_post; ++j) post[j] = std::tanh(sums[j]);
  }
  has_activity_ = true;
  return output();
}

std::span<const double> PlasticNetwork::layer_activations(std::size_t k) const {
  return std::span<const double>(activations_).subspan(topology_.neuron_offset(k),
                                                       topology_.layer_size(k));
}

std::span<const double> PlasticNetwork::output_presynaptic_sums() const {
  const std::size_t last = topology_.layer_count() - 1;
  return std::span<const double>(sums_).subspan(
      topology_.neuron_offset(last) - topology_.input_size(), topology_.output_size());
}

}  // namespace nchl
