#pragma once

#include <stdexcept>
#include <string>

namespace trackfuse {

/// Invalid configuration value or malformed config file.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or unsupported wire payload.
class DecodeError : public std::runtime_error {
public:
    explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

/// Operation applied at an inconsistent timestamp (regression or mismatch).
class TimeError : public std::logic_error {
public:
    explicit TimeError(const std::string& what) : std::logic_error(what) {}
};

/// Failure while reading or writing files.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace trackfuse
