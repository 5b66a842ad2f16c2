#pragma once

#include <stdexcept>
#include <string>

namespace vrpgp {

// Violated precondition of a library call (programming error on the caller's side).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Out-of-domain numeric parameter (negative lambda, negative budget, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class MalformedSolution : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InfeasibleInstance : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unsupported or inconsistent configuration (generator enums, rates, manifests, config files).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string &section, int line, const std::string &what)
        : std::runtime_error("line " + std::to_string(line) + " [" + section + "]: " + what)
        , section_(section)
        , line_(line) { }

    const std::string &section() const noexcept { return section_; }
    int line() const noexcept { return line_; }

private:
    std::string section_;
    int line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vrpgp
