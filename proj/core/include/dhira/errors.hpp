#pragma once

#include <stdexcept>
#include <string>

namespace dhira {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or invalid input data (bad file, bad record, bad argument).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what) {}
};

// Invalid run configuration (flag values outside their contracts).
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(what) {}
};

// Feature order / feature name disagreement between a model and the pipeline.
class ModelContractError : public Error {
 public:
  explicit ModelContractError(const std::string& what) : Error(what) {}
};

// Persisted model file cannot be parsed.
class ModelFormatError : public Error {
 public:
  explicit ModelFormatError(const std::string& what) : Error(what) {}
};

// Persisted model file has an unknown version tag.
class ModelVersionError : public Error {
 public:
  explicit ModelVersionError(const std::string& what) : Error(what) {}
};

// Two score sets that should refer to the same accounts do not line up.
class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string& what) : Error(what) {}
};

}  // namespace dhira
