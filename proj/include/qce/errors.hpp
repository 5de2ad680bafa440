#pragma once

#include <stdexcept>
#include <string>

namespace qce {

// Invalid input: schema violations, non-Hermitian matrices, dimension
// mismatches, out-of-range parameters.
class domain_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Input is valid but exceeds a hard size cap (dense dimension, subset
// enumeration width). The message names the offending object.
class resource_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An iterative routine failed to converge within its budget.
class numeric_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace qce
