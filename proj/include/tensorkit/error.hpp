#pragma once

#include <stdexcept>
#include <string>

namespace tk {

enum class ErrorKind {
    InconsistentIndices,
    FreeIndicesMismatch,
    IndexedBase,
    ScalarFunctionIndexedArg,
    InconsistentGenerators,
    LateSymmetryDefinition,
    RedefinitionConflict,
    MalformedRule,
    WrongArity,
    SyntaxError,
    IndexOutOfRange,
    ResourceLimit,
    Unsupported,
};

const char* errorKindName(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(errorKindName(kind)) + ": " + message),
          kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace tk
