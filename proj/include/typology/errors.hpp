#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace typology {

// Process exit codes used by the command-line tool.
enum class ExitCode : int { ok = 0, usage = 2, data = 3, numeric = 4 };

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, ExitCode code = ExitCode::data)
        : std::runtime_error(what), code_(code) {}
    ExitCode exit_code() const noexcept { return code_; }

private:
    ExitCode code_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

// A submission would leave an unknown slot unfilled, or fills a slot that is not unknown.
class CompletenessError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what, ExitCode::numeric) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what, ExitCode::usage) {}
};

// Caller broke a documented precondition (dimension mismatch, missing gold, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

}  // namespace typology
