#pragma once

#include <stdexcept>
#include <string>

namespace shardsim {

// Invalid run configuration: unknown preset, bad field value, broken
// divisibility. Message carries the offending field path when known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Inconsistent cache-protocol state handed to the schedule builder or
// detected while executing a program (e.g. clean flag with empty host cache).
class ProtocolError : public std::runtime_error {
 public:
  explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shardsim
