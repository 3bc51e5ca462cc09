#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace burst {

enum class ErrorKind {
    InvalidStream,   // fewer than two timestamps
    DegenerateSpan,  // zero time span
    EmptySpec,
    InvalidSpec,
    Parse,
    Order,           // decreasing timestamps
    Scale,           // maximum rate does not exceed the uniform rate
    Shape,           // fit does not tile the gap sequence
    Guard,           // brute force instance too large
    Io,
    Flag,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidStream: return "invalid stream";
    case ErrorKind::DegenerateSpan: return "degenerate span";
    case ErrorKind::EmptySpec: return "empty spec";
    case ErrorKind::InvalidSpec: return "invalid spec";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Order: return "order error";
    case ErrorKind::Scale: return "scale error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::Guard: return "guard error";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Flag: return "flag error";
    }
    return "error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace burst
