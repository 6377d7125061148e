#pragma once

#include <stdexcept>
#include <string>

namespace hitset {

/// No live set of the adversary is contained in the queried universe.
class EmptyRestriction : public std::runtime_error {
 public:
  explicit EmptyRestriction(const std::string& what) : std::runtime_error(what) {}
};

/// A caller-supplied parameter violates an operation's precondition.
class InvalidParameter : public std::invalid_argument {
 public:
  explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

/// A protocol or model was driven outside its contract (double proposal,
/// illegal color transition, too many adversary batches, ...).
class ProtocolFault : public std::logic_error {
 public:
  explicit ProtocolFault(const std::string& what) : std::logic_error(what) {}
};

/// An exhaustive search exceeded its configured state or candidate limit.
class ResourceLimit : public std::runtime_error {
 public:
  explicit ResourceLimit(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file or command-line configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hitset
