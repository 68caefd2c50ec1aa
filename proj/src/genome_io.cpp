#include "nchl/genome_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nchl {

using nlohmann::json;

std::string genome_to_json(const Genome& genome) {
  json eta = genome.eta().evolved ? json{{"mode", "evolved"}}
                                   : json{{"mode", "fixed"}, {"value", genome.eta().value}};
  json doc = {
      {"format", "nchl-genome"},
      {"version", 1},
      {"scheme", std::string(to_string(genome.scheme()))},
      {"eta", eta},
      {"topology", genome.topology().layer_sizes()},
      {"seed", genome.seed()},
      {"values", genome.values()},
  };
  return doc.dump(1) + "\n";
}

Genome genome_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("genome file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "nchl-genome") {
      throw std::runtime_error("not a genome checkpoint (format != nchl-genome)");
    }
    if (doc.at("version").get<int>() != 1) {
      throw std::runtime_error("unsupported genome checkpoint version");
    }
    const json& eta_doc = doc.at("eta");
    const std::string mode = eta_doc.at("mode").get<std::string>();
    EtaMode eta;
    if (mode == "evolved") {
      eta = EtaMode::evolving();
    } else if (mode == "fixed") {
      eta = EtaMode::fixed(eta_doc.at("value").get<double>());
    } else {
      throw std::runtime_error("unknown eta mode '" + mode + "'");
    }
    return Genome(parse_scheme(doc.at("scheme").get<std::string>()), eta,
                  Topology(doc.at("topology").get<std::vector<int>>()),
                  doc.at("values").get<std::vector<double>>(),
                  doc.at("seed").get<std::uint64_t>());
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed genome checkpoint: ") + e.what());
  }
}

void save_genome(const Genome& genome, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << genome_to_json(genome);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Genome load_genome(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return genome_from_json(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace nchl
