#pragma once

#include <stdexcept>
#include <string>

namespace cleanspread {

/// Argument outside the domain of a model function (e.g. supply beyond capacity).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid configuration or parameter set; reported before any compute starts.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite values or failed root/fixed-point searches during a computation.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CalibrationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace cleanspread
