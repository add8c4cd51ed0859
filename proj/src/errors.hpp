#pragma once

#include <stdexcept>
#include <string>

namespace xover {

enum class ErrorCode {
    InvalidInput,
    Parse,
    NotPositiveDefinite,
    Unsupported,
    Capacity,
    Io,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

} // namespace xover
