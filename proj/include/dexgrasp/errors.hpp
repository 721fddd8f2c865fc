#pragma once

#include <stdexcept>
#include <string>

namespace dexgrasp {

struct TooSparse : std::runtime_error {
    explicit TooSparse(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptyInput : std::runtime_error {
    explicit EmptyInput(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoContact : std::runtime_error {
    explicit NoContact(const std::string& msg) : std::runtime_error(msg) {}
};

struct TooShort : std::runtime_error {
    explicit TooShort(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateObject : std::runtime_error {
    explicit DegenerateObject(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoCandidates : std::runtime_error {
    explicit NoCandidates(const std::string& msg) : std::runtime_error(msg) {}
};

struct TooFewPoints : std::runtime_error {
    explicit TooFewPoints(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnknownClass : std::runtime_error {
    explicit UnknownClass(const std::string& msg) : std::runtime_error(msg) {}
};

struct Inapplicable : std::runtime_error {
    explicit Inapplicable(const std::string& msg) : std::runtime_error(msg) {}
};

struct BadDimensions : std::runtime_error {
    explicit BadDimensions(const std::string& msg) : std::runtime_error(msg) {}
};

struct BadType : std::runtime_error {
    explicit BadType(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeMismatch : std::runtime_error {
    explicit ShapeMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptySplit : std::runtime_error {
    explicit EmptySplit(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dexgrasp
