#include "cutsel/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "cutsel/errors.hpp"
#include "cutsel/rng.hpp"
#include "json.hpp"

namespace cutsel {

std::string family_name(Family family) {
  switch (family) {
    case Family::SetCovering:
      return "setcover";
    case Family::MaxIndependentSet:
      return "mis";
    case Family::MultipleKnapsack:
      return "mknapsack";
  }
  return "unknown";
}

Family family_from_name(const std::string& name) {
  if (name == "setcover" || name == "sc") return Family::SetCovering;
  if (name == "mis") return Family::MaxIndependentSet;
  if (name == "mknapsack" || name == "mk") return Family::MultipleKnapsack;
  throw ConfigError("unknown family: " + name);
}

GenSpec desk_spec(Family family) {
  GenSpec spec;
  spec.family = family;
  return spec;  // desk-scale sizes are the struct defaults
}

GenSpec paper_spec(Family family) {
  GenSpec spec;
  spec.family = family;
  spec.rows = 500;
  spec.cols = 1000;
  spec.density = 0.05;
  spec.cost_lo = 1;
  spec.cost_hi = 100;
  spec.nodes = 500;
  spec.affinity = 4;
  spec.items = 60;
  spec.knapsacks = 12;
  return spec;
}

namespace {

int scaled(int value, double scale) {
  return std::max(1, static_cast<int>(std::lround(value * scale)));
}

void make_binary(MilpInstance& inst) {
  inst.lower.assign(inst.n, 0.0);
  inst.upper.assign(inst.n, 1.0);
  inst.integer_set.resize(inst.n);
  std::iota(inst.integer_set.begin(), inst.integer_set.end(), 0);
}

// Rows covered by >= 2 columns, every column used at least once, column
// costs uniform integers in [cost_lo, cost_hi].
MilpInstance gen_set_covering(const GenSpec& spec, int index, Rng& rng) {
  const int rows = scaled(spec.rows, spec.scale);
  const int cols = scaled(spec.cols, spec.scale);
  MilpInstance inst;
  inst.name = family_name(spec.family) + "_s" + std::to_string(spec.seed) + "_" +
              std::to_string(index);
  inst.n = cols;
  inst.objective.resize(cols);
  for (int j = 0; j < cols; ++j)
    inst.objective[j] = static_cast<double>(rng.uniform_range(spec.cost_lo, spec.cost_hi));

  std::vector<std::set<int>> cover(static_cast<std::size_t>(rows));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j)
      if (rng.uniform() < spec.density) cover[static_cast<std::size_t>(i)].insert(j);
    while (cover[static_cast<std::size_t>(i)].size() < 2)
      cover[static_cast<std::size_t>(i)].insert(
          static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(cols))));
  }
  std::vector<char> used(static_cast<std::size_t>(cols), 0);
  for (const auto& cc : cover)
    for (int j : cc) used[static_cast<std::size_t>(j)] = 1;
  for (int j = 0; j < cols; ++j) {
    if (used[static_cast<std::size_t>(j)]) continue;
    cover[rng.uniform_int(static_cast<std::uint64_t>(rows))].insert(j);
  }

  for (int i = 0; i < rows; ++i) {
    Row row;  // sum_{j in cover} x_j >= 1, stored as <=
    row.rhs = -1.0;
    for (int j : cover[static_cast<std::size_t>(i)]) row.coefs.emplace_back(j, -1.0);
    inst.rows.push_back(std::move(row));
  }
  make_binary(inst);
  return inst;
}

std::vector<std::pair<int, int>> barabasi_albert(int nodes, int affinity, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  if (nodes <= affinity) {
    for (int u = 0; u < nodes; ++u)
      for (int v = u + 1; v < nodes; ++v) edges.emplace_back(u, v);
    return edges;
  }
  std::vector<int> repeated;
  std::vector<int> targets(static_cast<std::size_t>(affinity));
  std::iota(targets.begin(), targets.end(), 0);
  for (int v = affinity; v < nodes; ++v) {
    for (int t : targets) edges.emplace_back(std::min(t, v), std::max(t, v));
    repeated.insert(repeated.end(), targets.begin(), targets.end());
    repeated.insert(repeated.end(), static_cast<std::size_t>(affinity), v);
    // next targets: distinct preferential draws from the repeated list
    std::set<int> next;
    while (static_cast<int>(next.size()) < affinity)
      next.insert(repeated[rng.uniform_int(repeated.size())]);
    targets.assign(next.begin(), next.end());
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

MilpInstance gen_mis(const GenSpec& spec, int index, Rng& rng) {
  const int nodes = scaled(spec.nodes, spec.scale);
  const auto edges = barabasi_albert(nodes, spec.affinity, rng);
  MilpInstance inst = mis_from_edges(nodes, edges,
                                     family_name(spec.family) + "_s" +
                                         std::to_string(spec.seed) + "_" +
                                         std::to_string(index));
  return inst;
}

MilpInstance gen_mknapsack(const GenSpec& spec, int index, Rng& rng) {
  const int items = scaled(spec.items, spec.scale);
  const int knapsacks = std::max(1, spec.knapsacks);
  MilpInstance inst;
  inst.name = family_name(spec.family) + "_s" + std::to_string(spec.seed) + "_" +
              std::to_string(index);
  inst.n = items * knapsacks;  // x[i * knapsacks + j]: item i into knapsack j
  inst.objective.assign(inst.n, 0.0);
  std::vector<double> weight(static_cast<std::size_t>(items));
  double total_weight = 0.0;
  for (int i = 0; i < items; ++i) {
    const double profit = static_cast<double>(rng.uniform_range(10, 100));
    weight[static_cast<std::size_t>(i)] = static_cast<double>(rng.uniform_range(10, 50));
    total_weight += weight[static_cast<std::size_t>(i)];
    for (int j = 0; j < knapsacks; ++j)
      inst.objective[static_cast<std::size_t>(i * knapsacks + j)] = -profit;
  }
  const double capacity =
      std::floor(0.5 * total_weight / static_cast<double>(knapsacks));
  for (int i = 0; i < items; ++i) {  // each item placed at most once
    Row row;
    row.rhs = 1.0;
    for (int j = 0; j < knapsacks; ++j) row.coefs.emplace_back(i * knapsacks + j, 1.0);
    inst.rows.push_back(std::move(row));
  }
  for (int j = 0; j < knapsacks; ++j) {  // capacity rows
    Row row;
    row.rhs = capacity;
    for (int i = 0; i < items; ++i)
      row.coefs.emplace_back(i * knapsacks + j, weight[static_cast<std::size_t>(i)]);
    inst.rows.push_back(std::move(row));
  }
  make_binary(inst);
  return inst;
}

}  // namespace

MilpInstance mis_from_edges(int nodes, const std::vector<std::pair<int, int>>& edges,
                            const std::string& name) {
  MilpInstance inst;
  inst.name = name;
  inst.n = nodes;
  inst.objective.assign(nodes, -1.0);  // maximize the selected vertices
  for (const auto& [u, v] : edges) {
    Row row;
    row.rhs = 1.0;
    row.coefs.emplace_back(u, 1.0);
    row.coefs.emplace_back(v, 1.0);
    inst.rows.push_back(std::move(row));
  }
  make_binary(inst);
  return inst;
}

std::vector<MilpInstance> generate(const GenSpec& spec) {
  if (spec.count <= 0 || spec.density <= 0.0 || spec.density > 1.0)
    throw ConfigError("invalid generator spec");
  std::vector<MilpInstance> out;
  out.reserve(static_cast<std::size_t>(spec.count));
  for (int index = 0; index < spec.count; ++index) {
    Rng rng = Rng(spec.seed).child(0x6e9, static_cast<std::uint64_t>(index),
                                   static_cast<std::uint64_t>(spec.family));
    switch (spec.family) {
      case Family::SetCovering:
        out.push_back(gen_set_covering(spec, index, rng));
        break;
      case Family::MaxIndependentSet:
        out.push_back(gen_mis(spec, index, rng));
        break;
      case Family::MultipleKnapsack:
        out.push_back(gen_mknapsack(spec, index, rng));
        break;
    }
    out.back().validate();
  }
  return out;
}

std::string write_corpus(const std::vector<MilpInstance>& instances,
                         const std::string& dir, double train_fraction) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto split =
      static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(instances.size())));
  nlohmann::json manifest;
  manifest["train"] = nlohmann::json::array();
  manifest["test"] = nlohmann::json::array();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const std::string file = instances[i].name + ".json";
    write_instance(instances[i], dir + "/" + file);
    if (i < split)
      manifest["train"].push_back(file);
    else
      manifest["test"].push_back(file);
  }
  const std::string path = dir + "/manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << manifest.dump(2) << "\n";
  return path;
}

Corpus load_corpus(const std::string& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw IoError("cannot read " + manifest_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const nlohmann::json manifest = nlohmann::json::parse(buf.str());
  const std::string dir =
      std::filesystem::path(manifest_path).parent_path().string();
  Corpus corpus;
  for (const auto& f : manifest.at("train"))
    corpus.train.push_back(read_instance(dir + "/" + f.get<std::string>()));
  for (const auto& f : manifest.at("test"))
    corpus.test.push_back(read_instance(dir + "/" + f.get<std::string>()));
  return corpus;
}

}  // namespace cutsel
