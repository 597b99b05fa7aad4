#pragma once

#include <stdexcept>
#include <string>

namespace wdmqkd {

// Bad user-facing configuration (field values, units, file syntax).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical guarantee could not be met (quadrature tolerance, series truncation).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wdmqkd
