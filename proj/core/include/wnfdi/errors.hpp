#pragma once

#include <stdexcept>
#include <string>

namespace wnfdi {

// Error taxonomy shared by the library and the CLI. The CLI maps each class
// to a distinct process exit code (see tools/): validation 2, numerical 3,
// I/O 4. Success is 0.

// Malformed inputs, out-of-range parameters, violated preconditions.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical procedure cannot continue (non-finite Jacobian, a solve that
// must converge did not, singular system where a unique solution is required).
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Missing files, unreadable or unwritable paths, corrupt file payloads.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace wnfdi
