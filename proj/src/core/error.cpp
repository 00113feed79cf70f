#include "seedsweep/core/error.hpp"

#include <utility>

namespace seedsweep {

Error::Error(ErrorKind kind, std::string code, const std::string& message)
    : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

void throw_usage(const std::string& code, const std::string& message) {
    throw Error(ErrorKind::Usage, code, message);
}

void throw_data(const std::string& code, const std::string& message) {
    throw Error(ErrorKind::Data, code, message);
}

void throw_model(const std::string& code, const std::string& message) {
    throw Error(ErrorKind::Model, code, message);
}

}  // namespace seedsweep
