#pragma once

#include <stdexcept>
#include <string>

namespace archbuild {

struct InvalidPlacement : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidMessage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InactiveMessage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoLegalMessage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BufferTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnbuildableShape : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IOError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingRun : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatVersionMismatch : CheckpointError {
  using CheckpointError::CheckpointError;
};

struct DimensionMismatch : CheckpointError {
  using CheckpointError::CheckpointError;
};

}  // namespace archbuild
