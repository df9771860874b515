// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <stdexcept>
#include <string>

namespace sphera {

// Quadrature or iteration failed to reach its tolerance.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Input data could not be parsed or is unusable.
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace sphera
