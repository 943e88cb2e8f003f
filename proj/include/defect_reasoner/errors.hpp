#pragma once

#include <stdexcept>
#include <string>

namespace defect_reasoner {

// One exception type per pipeline stage so callers can report which
// stage failed without string matching.

class IngestError : public std::runtime_error {
public:
    explicit IngestError(const std::string& msg) : std::runtime_error(msg) {}
};

class TargetsError : public std::runtime_error {
public:
    explicit TargetsError(const std::string& msg) : std::runtime_error(msg) {}
};

class DefCharError : public std::runtime_error {
public:
    explicit DefCharError(const std::string& msg) : std::runtime_error(msg) {}
};

class ReasonerError : public std::runtime_error {
public:
    explicit ReasonerError(const std::string& msg) : std::runtime_error(msg) {}
};

class ExplainError : public std::runtime_error {
public:
    explicit ExplainError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace defect_reasoner
