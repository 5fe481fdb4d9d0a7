#pragma once

#include <stdexcept>
#include <string>

namespace mpmab {

/// Invalid experiment or model configuration. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A policy broke its contract (illegal action, impossible decode).
/// Aborts the replication; maps to CLI exit code 3.
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mpmab
