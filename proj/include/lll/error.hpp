#pragma once

#include <stdexcept>
#include <string>

namespace lll {

enum class ErrorKind {
    InvalidArgument,
    ParseError,
    InvariantViolation,
    CapExceeded,
    CriterionViolated,
    TooLarge,
    SearcherIncomplete,
    StoryExplosion,
    NoRoot,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::ParseError: return "parse-error";
        case ErrorKind::InvariantViolation: return "invariant-violation";
        case ErrorKind::CapExceeded: return "cap-exceeded";
        case ErrorKind::CriterionViolated: return "criterion-violated";
        case ErrorKind::TooLarge: return "too-large";
        case ErrorKind::SearcherIncomplete: return "searcher-incomplete";
        case ErrorKind::StoryExplosion: return "story-explosion";
        case ErrorKind::NoRoot: return "no-root";
    }
    return "unknown";
}

/// Every failure raised by the library carries a kind so callers (notably the
/// CLI) can map it onto an exit status without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

}  // namespace lll
