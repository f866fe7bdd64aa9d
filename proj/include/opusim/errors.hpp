#pragma once

#include <stdexcept>
#include <string>

namespace opusim {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad experiment configuration (unknown key, invalid value, missing file).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

// Malformed tensor/dataset file (bad magic, truncated payload, bad dims).
class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error(what) {}
};

// A readout saturated the ADC.  The tile scaling rule is supposed to make
// this impossible, so hitting it means the caller violated the contract.
class SaturationError : public Error {
public:
    explicit SaturationError(const std::string& what) : Error(what) {}
};

}  // namespace opusim
