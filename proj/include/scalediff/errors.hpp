#pragma once

#include <stdexcept>
#include <string>

namespace scalediff {

// Exit codes shared by the CLI and the acceptance runner.
enum ExitCode : int {
    kExitPass = 0,
    kExitCriterion = 1,
    kExitUsage = 2,
    kExitNumeric = 3,
};

class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

class ModelError : public std::invalid_argument {
public:
    explicit ModelError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace scalediff
