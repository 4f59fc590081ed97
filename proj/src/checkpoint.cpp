#include "cutsel/checkpoint.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cutsel/errors.hpp"
#include "json.hpp"

namespace cutsel {

using nlohmann::json;

std::string checkpoint_to_json(const ParamList& params) {
  json tensors;
  for (const Parameter* p : params) {
    tensors[p->name] = json{{"shape", json::array({p->value.rows, p->value.cols})},
                            {"data", p->value.v}};
  }
  json doc{{"schema_version", 1}, {"tensors", tensors}};
  return doc.dump(2) + "\n";
}

void save_checkpoint(const std::string& path, const ParamList& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path);
  out << checkpoint_to_json(params);
}

void load_checkpoint_json(const std::string& text, const ParamList& params) {
  json doc = json::parse(text);
  if (doc.value("schema_version", 0) != 1)
    throw IoError("unsupported checkpoint schema version");
  const json& tensors = doc.at("tensors");
  for (Parameter* p : params) {
    if (!tensors.contains(p->name))
      throw IoError("checkpoint is missing tensor " + p->name);
    const json& t = tensors.at(p->name);
    const int r = t.at("shape")[0].get<int>();
    const int c = t.at("shape")[1].get<int>();
    if (r != p->value.rows || c != p->value.cols)
      throw IoError("checkpoint shape mismatch for " + p->name);
    p->value.v = t.at("data").get<std::vector<double>>();
    if (static_cast<int>(p->value.v.size()) != r * c)
      throw IoError("checkpoint data length mismatch for " + p->name);
  }
}

void load_checkpoint(const std::string& path, const ParamList& params) {
  if (!std::filesystem::exists(path))
    throw MissingCheckpoint("checkpoint not found: " + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingCheckpoint("cannot open checkpoint " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  load_checkpoint_json(buf.str(), params);
}

std::map<std::string, Tensor> read_checkpoint_tensors(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw MissingCheckpoint("checkpoint not found: " + path);
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  json doc = json::parse(buf.str());
  std::map<std::string, Tensor> out;
  for (const auto& [name, t] : doc.at("tensors").items()) {
    Tensor tensor(t.at("shape")[0].get<int>(), t.at("shape")[1].get<int>());
    tensor.v = t.at("data").get<std::vector<double>>();
    out.emplace(name, std::move(tensor));
  }
  return out;
}

}  // namespace cutsel
