#pragma once

#include <stdexcept>
#include <string>

namespace seedsweep {

/// Broad error category. The CLI maps each to an exit code.
enum class ErrorKind {
    Usage,  // bad invocation or configuration (exit 1)
    Data,   // malformed or inconsistent input data (exit 2)
    Model   // numerical or estimation failure (exit 3)
};

/// Library exception carrying a stable, greppable code such as
/// "E_DATA_MISSING_COLUMN" in addition to the human-readable message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

[[noreturn]] void throw_usage(const std::string& code, const std::string& message);
[[noreturn]] void throw_data(const std::string& code, const std::string& message);
[[noreturn]] void throw_model(const std::string& code, const std::string& message);

}  // namespace seedsweep
