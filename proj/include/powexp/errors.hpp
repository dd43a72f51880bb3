#pragma once

#include <stdexcept>
#include <string>

namespace powexp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation hit a point/box outside a function's domain (ln of a
// nonpositive value, division by an interval containing zero, 0^negative).
struct DomainError : Error {
    explicit DomainError(const std::string& what, std::string subterm = {})
        : Error(subterm.empty() ? what : what + " in subterm: " + subterm),
          subterm_(std::move(subterm)) {}
    const std::string& subterm() const { return subterm_; }

private:
    std::string subterm_;
};

struct ParseError : Error {
    ParseError(int line, int col, const std::string& msg)
        : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line(line), col(col) {}
    int line;
    int col;
};

struct UnboundVariableError : ParseError {
    UnboundVariableError(int line, int col, const std::string& name)
        : ParseError(line, col, "unbound variable '" + name + "'"), name(name) {}
    std::string name;
};

struct UnknownIdError : Error {
    explicit UnknownIdError(const std::string& id)
        : Error("unknown id '" + id + "'"), id(id) {}
    std::string id;
};

}  // namespace powexp
