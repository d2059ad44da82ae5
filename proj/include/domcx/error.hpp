#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace domcx {

enum class ErrorKind {
    invalid_topology,
    shape,
    empty_dataset,
    format,
    generation,
    invalid_argument,
    degenerate_input,
    degenerate_fit,
};

/// Name used in machine-readable error records, e.g. "FormatError".
std::string_view error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view kind_name() const noexcept { return error_kind_name(kind_); }

private:
    ErrorKind kind_;
};

template <ErrorKind K>
class KindError : public Error {
public:
    explicit KindError(const std::string& message) : Error(K, message) {}
};

using InvalidTopology = KindError<ErrorKind::invalid_topology>;
using ShapeError = KindError<ErrorKind::shape>;
using EmptyDataset = KindError<ErrorKind::empty_dataset>;
using FormatError = KindError<ErrorKind::format>;
using GenerationError = KindError<ErrorKind::generation>;
using InvalidArgument = KindError<ErrorKind::invalid_argument>;
using DegenerateInput = KindError<ErrorKind::degenerate_input>;
using DegenerateFit = KindError<ErrorKind::degenerate_fit>;

/// Throws the concrete subclass matching `kind`. Used to re-raise an error
/// with added context without losing its type.
[[noreturn]] void throw_error(ErrorKind kind, const std::string& message);

}  // namespace domcx
