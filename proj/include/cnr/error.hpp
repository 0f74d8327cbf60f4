#pragma once

#include <stdexcept>
#include <string>

namespace cnr {

enum class ErrorCode {
    UnknownNode,
    EmptyDocument,
    EmptyBlockSet,
    AtRoot,
    NoChildren,
    BadPath,
    ManifestError,
    InvalidArgument,
    // Reserved: decoding is lossy (invalid bytes become U+FFFD), so no input
    // currently fails to decode.
    InputNotDecodable,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::EmptyBlockSet: return "EmptyBlockSet";
    case ErrorCode::AtRoot: return "AtRoot";
    case ErrorCode::NoChildren: return "NoChildren";
    case ErrorCode::BadPath: return "BadPath";
    case ErrorCode::ManifestError: return "ManifestError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InputNotDecodable: return "InputNotDecodable";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace cnr
