#include "domcx/error.hpp"

namespace domcx {

std::string_view error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_topology: return "InvalidTopology";
        case ErrorKind::shape: return "ShapeError";
        case ErrorKind::empty_dataset: return "EmptyDataset";
        case ErrorKind::format: return "FormatError";
        case ErrorKind::generation: return "GenerationError";
        case ErrorKind::invalid_argument: return "InvalidArgument";
        case ErrorKind::degenerate_input: return "DegenerateInput";
        case ErrorKind::degenerate_fit: return "DegenerateFit";
    }
    return "Error";
}

void throw_error(ErrorKind kind, const std::string& message) {
    switch (kind) {
        case ErrorKind::invalid_topology: throw InvalidTopology(message);
        case ErrorKind::shape: throw ShapeError(message);
        case ErrorKind::empty_dataset: throw EmptyDataset(message);
        case ErrorKind::format: throw FormatError(message);
        case ErrorKind::generation: throw GenerationError(message);
        case ErrorKind::invalid_argument: throw InvalidArgument(message);
        case ErrorKind::degenerate_input: throw DegenerateInput(message);
        case ErrorKind::degenerate_fit: throw DegenerateFit(message);
    }
    throw Error(kind, message);
}

}  // namespace domcx
