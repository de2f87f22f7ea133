#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace redash {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed document bytes. `offset` is the byte offset reported by the JSON
/// reader (0 when the problem is structural), `path` a JSON pointer.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset, std::string path)
        : Error(what + " at " + (path.empty() ? std::string("/") : path) + " (byte " +
                std::to_string(offset) + ")"),
          offset_(offset),
          path_(std::move(path)) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::string& path() const noexcept { return path_; }

private:
    std::size_t offset_;
    std::string path_;
};

struct Violation {
    std::string componentId;  // empty for document-level rules
    std::string field;
    std::string rule;

    friend bool operator==(const Violation&, const Violation&) = default;
};

inline std::string to_string(const Violation& v) {
    std::string out = v.componentId.empty() ? "<doc>" : v.componentId;
    out += '.';
    out += v.field;
    out += ": ";
    out += v.rule;
    return out;
}

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations)
        : Error(summarize(violations)), violations_(std::move(violations)) {}

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    static std::string summarize(const std::vector<Violation>& vs) {
        std::string out = "validation failed";
        for (const auto& v : vs) {
            out += "; ";
            out += to_string(v);
        }
        return out;
    }

    std::vector<Violation> violations_;
};

/// Unknown component, reference or canvas id.
class NotFound : public Error {
public:
    using Error::Error;
};

/// Bad request data that is not a document violation: type mismatches,
/// inapplicable locks, empty selections.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Extractor or merger service failed.
class ExternalServiceError : public Error {
public:
    using Error::Error;
};

/// Undo on a session whose history holds only the current document.
class Conflict : public Error {
public:
    using Error::Error;
};

class StorageError : public Error {
public:
    using Error::Error;
};

}  // namespace redash
