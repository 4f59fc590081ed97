#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cutsel/milp.hpp"

namespace cutsel {

enum class Family { SetCovering, MaxIndependentSet, MultipleKnapsack };

std::string family_name(Family family);
Family family_from_name(const std::string& name);

struct GenSpec {
  Family family = Family::SetCovering;
  // set covering
  int rows = 30, cols = 60;
  double density = 0.15;
  int cost_lo = 10, cost_hi = 20;  // column cost range
  // maximum independent set (Barabasi-Albert graph)
  int nodes = 25, affinity = 4;
  // multiple knapsack
  int items = 12, knapsacks = 3;

  std::uint64_t seed = 1;
  int count = 10;
  double scale = 1.0;  // multiplies the linear size parameters
};

// Desk-scale defaults (CI-sized) and the sizes used at full scale.
GenSpec desk_spec(Family family);
GenSpec paper_spec(Family family);

// Deterministic generation: the same spec and seed produce byte-identical
// instances. Every instance is feasible (all-zero is feasible for each
// family) and bounded (binary variables).
std::vector<MilpInstance> generate(const GenSpec& spec);

// Maximum-independent-set model for an explicit edge list.
MilpInstance mis_from_edges(int nodes, const std::vector<std::pair<int, int>>& edges,
                            const std::string& name);

struct Corpus {
  std::vector<MilpInstance> train, test;
};

// Writes instance files plus manifest.json listing the 80/20 split.
std::string write_corpus(const std::vector<MilpInstance>& instances,
                         const std::string& dir, double train_fraction = 0.8);
Corpus load_corpus(const std::string& manifest_path);

}  // namespace cutsel
