#include "tensorkit/error.hpp"

namespace tk {

const char* errorKindName(ErrorKind k) {
    switch (k) {
        case ErrorKind::InconsistentIndices: return "InconsistentIndices";
        case ErrorKind::FreeIndicesMismatch: return "FreeIndicesMismatch";
        case ErrorKind::IndexedBase: return "IndexedBase";
        case ErrorKind::ScalarFunctionIndexedArg: return "ScalarFunctionIndexedArg";
        case ErrorKind::InconsistentGenerators: return "InconsistentGenerators";
        case ErrorKind::LateSymmetryDefinition: return "LateSymmetryDefinition";
        case ErrorKind::RedefinitionConflict: return "RedefinitionConflict";
        case ErrorKind::MalformedRule: return "MalformedRule";
        case ErrorKind::WrongArity: return "WrongArity";
        case ErrorKind::SyntaxError: return "SyntaxError";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::ResourceLimit: return "ResourceLimit";
        case ErrorKind::Unsupported: return "Unsupported";
    }
    return "Error";
}

}  // namespace tk
