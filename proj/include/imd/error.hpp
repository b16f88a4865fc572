#pragma once

#include <stdexcept>

namespace imd {

/// Thrown on contract violations (bad shapes, negative masses, ...).
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace imd
