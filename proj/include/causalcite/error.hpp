#pragma once
// Error taxonomy shared by the library and the CLI.
//
// Every failure the engine can signal carries a kind that maps onto the
// CLI's stable exit-code contract:
//   0 success, 2 missing input, 3 format error, 4 domain contract error,
//   5 internal error.

#include <stdexcept>
#include <string>

namespace causalcite {

enum class ErrorKind {
    Io,        // unreadable / missing input
    Format,    // input exists but violates a declared file format
    NotFound,  // unknown paper / doc id
    Contract,  // precondition or domain invariant violated
    Conflict,  // conflicting duplicate records
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    int exit_code() const noexcept {
        switch (kind_) {
            case ErrorKind::Io: return 2;
            case ErrorKind::Format: return 3;
            case ErrorKind::NotFound:
            case ErrorKind::Contract:
            case ErrorKind::Conflict: return 4;
            case ErrorKind::Internal: return 5;
        }
        return 5;
    }

private:
    ErrorKind kind_;
};

struct IoError : Error {
    explicit IoError(std::string m) : Error(ErrorKind::Io, std::move(m)) {}
};
struct FormatError : Error {
    explicit FormatError(std::string m) : Error(ErrorKind::Format, std::move(m)) {}
};
struct NotFoundError : Error {
    explicit NotFoundError(std::string m) : Error(ErrorKind::NotFound, std::move(m)) {}
};
struct ContractError : Error {
    explicit ContractError(std::string m) : Error(ErrorKind::Contract, std::move(m)) {}
};
struct ConflictError : Error {
    explicit ConflictError(std::string m) : Error(ErrorKind::Conflict, std::move(m)) {}
};
struct InternalError : Error {
    explicit InternalError(std::string m) : Error(ErrorKind::Internal, std::move(m)) {}
};

}  // namespace causalcite
