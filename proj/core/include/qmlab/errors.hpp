#pragma once

#include <stdexcept>
#include <string>

namespace qmlab {

// Requested accuracy could not be certified (quadrature, ODE, residual gates).
class ToleranceError : public std::runtime_error {
public:
    explicit ToleranceError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed scenario/potential file. Carries enough context to point at the
// offending line or key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::string key = {}, int line = 0)
        : std::runtime_error(what), key_(std::move(key)), line_(line) {}

    const std::string& key() const { return key_; }
    int line() const { return line_; }

private:
    std::string key_;
    int line_;
};

} // namespace qmlab
