#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace ksd {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Invalid inputs to an operation (out-of-range arguments, bad dimensions).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A basis family whose derivative cannot be expressed inside the family.
struct ClosureError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed system-description files.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical breakdown (singular Gram matrices, diverging integration, ...).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Missing or unusable solver backend.
struct EnvironmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const char* version() { return "0.1.0"; }

}  // namespace ksd
