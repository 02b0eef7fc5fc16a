#pragma once

#include <stdexcept>
#include <string>

namespace harness {

/// Bad command line; maps to process exit code 2.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration or case data; maps to process exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input text (modules files, templates, goldens, reports).
class ParseError : public ConfigError {
public:
    explicit ParseError(const std::string& msg) : ConfigError(msg) {}
};

}  // namespace harness
