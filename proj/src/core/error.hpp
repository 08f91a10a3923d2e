#pragma once

#include <stdexcept>
#include <string>

namespace hop {

/// Error categories, stable across the library boundary.
/// Values mirror the CLI exit-code contract.
enum class ErrorCode {
    Usage = 1,     // bad arguments, unknown keys, malformed requests
    Data = 2,      // unreadable/inconsistent input data
    Abort = 3,     // pipeline gave up (e.g. no confident global fix)
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail_usage(const std::string& msg) { throw Error(ErrorCode::Usage, msg); }
[[noreturn]] inline void fail_data(const std::string& msg) { throw Error(ErrorCode::Data, msg); }
[[noreturn]] inline void fail_abort(const std::string& msg) { throw Error(ErrorCode::Abort, msg); }

}  // namespace hop
