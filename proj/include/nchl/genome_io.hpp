#pragma once

#include <filesystem>
#include <string>

#include "nchl/plasticity.hpp"

namespace nchl {

// Genome checkpoint: a JSON document
//   {"format": "nchl-genome", "version": 1, "scheme": ..., "eta": {...},
//    "topology": [...], "seed": ..., "values": [...]}
// Doubles are written with round-trip precision, so load(save(g)) == g.
std::string genome_to_json(const Genome& genome);
Genome genome_from_json(const std::string& text);

void save_genome(const Genome& genome, const std::filesystem::path& path);
Genome load_genome(const std::filesystem::path& path);

}  // namespace nchl
