#include "nchl/trajectory.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace nchl {

TrajectoryFamily parse_family(const std::string& text) {
  if (text == "input") return TrajectoryFamily::kInput;
  if (text == "pre") return TrajectoryFamily::kPre;
  if (text == "post") return TrajectoryFamily::kPost;
  throw std::invalid_argument("unknown trajectory family '" + text +
                              "' (expected input, pre or post)");
}

const std::vector<std::vector<double>>& TrajectoryRecord::family(TrajectoryFamily f) const {
  switch (f) {
    case TrajectoryFamily::kInput: return inputs;
    case TrajectoryFamily::kPre: return pre;
    case TrajectoryFamily::kPost: return post;
  }
  return inputs;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = line.find(sep, pos);
    out.push_back(line.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw std::runtime_error("bad number '" + s + "' in trajectory CSV");
  }
  return v;
}

}  // namespace

std::string trajectory_to_csv(const TrajectoryRecord& record) {
  std::string out = "step,label";
  for (std::size_t i = 0; i < record.input_dim; ++i) out += ",in_" + std::to_string(i);
  for (std::size_t i = 0; i < record.output_dim; ++i) out += ",pre_" + std::to_string(i);
  for (std::size_t i = 0; i < record.output_dim; ++i) out += ",post_" + std::to_string(i);
  out += '\n';
  for (std::size_t t = 0; t < record.steps(); ++t) {
    out += std::to_string(t);
    out += ',';
    out += record.label;
    for (const auto* row : {&record.inputs[t], &record.pre[t], &record.post[t]}) {
      for (double v : *row) {
        out += ',';
        append_double(out, v);
      }
    }
    out += '\n';
  }
  return out;
}

TrajectoryRecord trajectory_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trajectory CSV");
  const auto header = split(line, ',');
  if (header.size() < 2 || header[0] != "step" || header[1] != "label") {
    throw std::runtime_error("trajectory CSV header must start with step,label");
  }
  TrajectoryRecord rec;
  for (std::size_t c = 2; c < header.size(); ++c) {
    if (header[c].rfind("in_", 0) == 0) ++rec.input_dim;
    else if (header[c].rfind("pre_", 0) == 0) ++rec.output_dim;
  }
  if (header.size() != 2 + rec.input_dim + 2 * rec.output_dim) {
    throw std::runtime_error("trajectory CSV header has inconsistent column groups");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw std::runtime_error("trajectory CSV row " + std::to_string(rec.steps()) +
                               " has " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
    }
    if (rec.steps() == 0) rec.label = cells[1];
    std::size_t c = 2;
    auto take = [&](std::size_t n) {
      std::vector<double> row(n);
      for (double& v : row) v = parse_double(cells[c++]);
      return row;
    };
    rec.inputs.push_back(take(rec.input_dim));
    rec.pre.push_back(take(rec.output_dim));
    rec.post.push_back(take(rec.output_dim));
  }
  return rec;
}

}  // namespace nchl
