#pragma once

#include <map>
#include <string>

#include "cutsel/tape.hpp"

namespace cutsel {

// Versioned JSON checkpoint: {"schema_version": 1, "tensors": {name:
// {"shape": [r, c], "data": [...]}}}. save -> load -> save is byte-identical.
std::string checkpoint_to_json(const ParamList& params);
void save_checkpoint(const std::string& path, const ParamList& params);

// Loads tensors by name into the given parameters; every parameter must be
// present with a matching shape. Throws MissingCheckpoint when the file does
// not exist and IoError on malformed content.
void load_checkpoint(const std::string& path, const ParamList& params);
void load_checkpoint_json(const std::string& text, const ParamList& params);

std::map<std::string, Tensor> read_checkpoint_tensors(const std::string& path);

}  // namespace cutsel
