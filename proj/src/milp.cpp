#include "cutsel/milp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cutsel/errors.hpp"
#include "json.hpp"

namespace cutsel {

using nlohmann::json;

bool MilpInstance::is_integer(int j) const {
  return std::binary_search(integer_set.begin(), integer_set.end(), j);
}

void MilpInstance::validate() const {
  if (n < 0) throw DimensionMismatch("negative variable count");
  if (static_cast<int>(objective.size()) != n)
    throw DimensionMismatch("objective length != n in " + name);
  if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n)
    throw DimensionMismatch("bounds length != n in " + name);
  for (int j = 0; j < n; ++j) {
    if (lower[j] > upper[j])
      throw DimensionMismatch("lower > upper for variable " + std::to_string(j));
  }
  for (const Row& row : rows) {
    for (const auto& [idx, val] : row.coefs) {
      (void)val;
      if (idx < 0 || idx >= n)
        throw DimensionMismatch("row coefficient index out of range in " + name);
    }
  }
  if (!std::is_sorted(integer_set.begin(), integer_set.end()))
    throw DimensionMismatch("integer set not sorted in " + name);
  for (int j : integer_set) {
    if (j < 0 || j >= n)
      throw DimensionMismatch("integer index out of range in " + name);
  }
}

MilpInstance add_rows(const MilpInstance& instance, const std::vector<Cut>& cuts) {
  MilpInstance out = instance;
  out.rows.reserve(out.rows.size() + cuts.size());
  for (const Cut& cut : cuts) {
    Row row;
    row.rhs = cut.beta;
    row.coefs = cut.alpha;
    for (const auto& [idx, val] : row.coefs) {
      (void)val;
      if (idx < 0 || idx >= instance.n)
        throw DimensionMismatch("cut index out of range");
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

namespace {

json bound_to_json(double v) {
  if (v == kInf) return json("inf");
  if (v == -kInf) return json("-inf");
  return json(v);
}

double bound_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw IoError("bad bound string: " + s);
  }
  return j.get<double>();
}

}  // namespace

std::string instance_to_json(const MilpInstance& instance) {
  json doc;
  doc["name"] = instance.name;
  doc["n"] = instance.n;
  doc["m"] = instance.num_rows();
  doc["c"] = instance.objective;
  json rows = json::array();
  for (const Row& row : instance.rows) {
    json coefs = json::array();
    for (const auto& [idx, val] : row.coefs) coefs.push_back(json::array({idx, val}));
    rows.push_back(json{{"coefs", coefs}, {"rhs", row.rhs}, {"rel", "<="}});
  }
  doc["rows"] = rows;
  doc["integers"] = instance.integer_set;
  json bounds = json::array();
  for (int j = 0; j < instance.n; ++j)
    bounds.push_back(json::array({bound_to_json(instance.lower[j]), bound_to_json(instance.upper[j])}));
  doc["bounds"] = bounds;
  return doc.dump(2) + "\n";
}

MilpInstance instance_from_json(const std::string& text) {
  json doc = json::parse(text);
  MilpInstance inst;
  inst.name = doc.at("name").get<std::string>();
  inst.n = doc.at("n").get<int>();
  inst.objective = doc.at("c").get<std::vector<double>>();
  inst.integer_set = doc.at("integers").get<std::vector<int>>();
  std::sort(inst.integer_set.begin(), inst.integer_set.end());
  inst.lower.assign(inst.n, 0.0);
  inst.upper.assign(inst.n, kInf);
  if (doc.contains("bounds")) {
    const json& bounds = doc.at("bounds");
    if (static_cast<int>(bounds.size()) != inst.n)
      throw IoError("bounds length mismatch in " + inst.name);
    for (int j = 0; j < inst.n; ++j) {
      inst.lower[j] = bound_from_json(bounds[j][0]);
      inst.upper[j] = bound_from_json(bounds[j][1]);
    }
  }
  // Integer variable bounds tightened to integral values so that shifted
  // nonbasic variables stay integral in the cut derivation.
  for (int j : inst.integer_set) {
    if (std::isfinite(inst.lower[j]))
      inst.lower[j] = std::ceil(inst.lower[j] - kIntTol) + 0.0;  // avoid -0.0
    if (std::isfinite(inst.upper[j])) inst.upper[j] = std::floor(inst.upper[j] + kIntTol) + 0.0;
  }
  for (const json& row_doc : doc.at("rows")) {
    Row row;
    row.rhs = row_doc.at("rhs").get<double>();
    for (const json& pair : row_doc.at("coefs"))
      row.coefs.emplace_back(pair[0].get<int>(), pair[1].get<double>());
    const std::string rel = row_doc.value("rel", "<=");
    if (rel == "<=") {
      inst.rows.push_back(std::move(row));
    } else if (rel == ">=") {
      for (auto& [idx, val] : row.coefs) {
        (void)idx;
        val = -val;
      }
      row.rhs = -row.rhs;
      inst.rows.push_back(std::move(row));
    } else if (rel == "=") {
      Row neg = row;
      for (auto& [idx, val] : neg.coefs) {
        (void)idx;
        val = -val;
      }
      neg.rhs = -neg.rhs;
      inst.rows.push_back(std::move(row));
      inst.rows.push_back(std::move(neg));
    } else {
      throw IoError("unknown relation: " + rel);
    }
  }
  inst.validate();
  return inst;
}

void write_instance(const MilpInstance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << instance_to_json(instance);
}

MilpInstance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

}  // namespace cutsel
