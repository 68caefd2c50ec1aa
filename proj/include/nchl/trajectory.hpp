#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace nchl {

enum class TrajectoryFamily { kInput, kPre, kPost };

TrajectoryFamily parse_family(const std::string& text);

// Per forward step: the network input, the output layer's sums before tanh
// and the output layer's activations.
struct TrajectoryRecord {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;
  std::string label;

  std::size_t steps() const { return inputs.size(); }
  const std::vector<std::vector<double>>& family(TrajectoryFamily f) const;
};

// CSV with header "step,label,in_0..,pre_0..,post_0..", one row per step.
std::string trajectory_to_csv(const TrajectoryRecord& record);
TrajectoryRecord trajectory_from_csv(const std::string& text);

}  // namespace nchl
