#ifndef DUALVOL_ERRORS_HPP
#define DUALVOL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dualvol {

enum class ErrorKind {
    UnsupportedComposition,
    SingularTransform,
    MalformedBody,
    GenerationFailed,
    IterationLimit,
    BadScheme,
    NonFiniteIntegrand,
    ExponentOutOfRange,
    GridTooCoarse,
    DegenerateSpan,
    NoContacts,
    NotInJohnPosition,
    ParseError,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::UnsupportedComposition: return "UnsupportedComposition";
    case ErrorKind::SingularTransform: return "SingularTransform";
    case ErrorKind::MalformedBody: return "MalformedBody";
    case ErrorKind::GenerationFailed: return "GenerationFailed";
    case ErrorKind::IterationLimit: return "IterationLimit";
    case ErrorKind::BadScheme: return "BadScheme";
    case ErrorKind::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorKind::ExponentOutOfRange: return "ExponentOutOfRange";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::DegenerateSpan: return "DegenerateSpan";
    case ErrorKind::NoContacts: return "NoContacts";
    case ErrorKind::NotInJohnPosition: return "NotInJohnPosition";
    case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it onto an exit code without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace dualvol

#endif
