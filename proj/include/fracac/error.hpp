#pragma once

#include <stdexcept>
#include <string>

namespace fracac {

enum class ErrorKind {
    InvalidParameter,
    ToleranceUnachievable,
    PicardDiverged,
    AssumptionViolated,
    NonPositiveShift,
    Overflow,
    Config,
    Io,
};

/// Library error. The kind selects the CLI exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace fracac
