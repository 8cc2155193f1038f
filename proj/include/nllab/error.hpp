#pragma once

#include <stdexcept>
#include <string>

namespace nllab {

/// Raised for precondition violations and corrupt inputs anywhere in the lab.
class LabError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void ensure(bool condition, const std::string& message) {
  if (!condition) throw LabError(message);
}

}  // namespace nllab
