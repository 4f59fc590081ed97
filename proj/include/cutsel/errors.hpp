#pragma once

#include <stdexcept>
#include <string>

namespace cutsel {

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalFailure : std::runtime_error {
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

struct ShapeMismatch : std::runtime_error {
  explicit ShapeMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteDetected : std::runtime_error {
  explicit NonFiniteDetected(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroNormCut : std::runtime_error {
  explicit ZeroNormCut(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateState : std::runtime_error {
  explicit DegenerateState(const std::string& what) : std::runtime_error(what) {}
};

struct UndefinedImprovement : std::runtime_error {
  explicit UndefinedImprovement(const std::string& what) : std::runtime_error(what) {}
};

struct MissingCheckpoint : std::runtime_error {
  explicit MissingCheckpoint(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidSelection : std::runtime_error {
  explicit InvalidSelection(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cutsel
