#pragma once

#include <stdexcept>
#include <string>

namespace jetflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Location of a grid node in global (axial, radial, azimuthal) indices.
struct NodeIndex {
  int i = 0;
  int j = 0;
  int k = 0;
};

std::string to_string(const NodeIndex& n);

class InvalidStateError : public Error {
 public:
  InvalidStateError(const std::string& what, NodeIndex where)
      : Error(what + " at node " + to_string(where)), node(where) {}
  NodeIndex node;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line_number = 0)
      : Error(line_number > 0 ? "line " + std::to_string(line_number) + ": " + what : what),
        line(line_number) {}
  int line;
};

class MeshQualityError : public Error {
 public:
  MeshQualityError(const std::string& what, NodeIndex worst)
      : Error(what + " (worst node " + to_string(worst) + ")"), node(worst) {}
  NodeIndex node;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, NodeIndex where, long iteration, int stage)
      : Error(what + " at node " + to_string(where) + ", iteration " + std::to_string(iteration) +
              ", stage " + std::to_string(stage)),
        node(where),
        iteration(iteration),
        stage(stage) {}
  NodeIndex node;
  long iteration;
  int stage;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

/// A blocking wait exceeded its timeout; the message lists who never showed up.
class DeadlockError : public TransportError {
 public:
  using TransportError::TransportError;
};

/// Raised in workers woken up because another worker aborted the run.
class AbortedError : public TransportError {
 public:
  using TransportError::TransportError;
};

class StorageError : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public StorageError {
 public:
  using StorageError::StorageError;
};

class VersionError : public StorageError {
 public:
  using StorageError::StorageError;
};

class ExtentMismatchError : public StorageError {
 public:
  using StorageError::StorageError;
};

class IncompatibleCheckpointError : public StorageError {
 public:
  using StorageError::StorageError;
};

class IncompleteSweepError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace jetflow
