#pragma once

#include <stdexcept>
#include <string>

namespace misc {

// Dimension or shape mismatch between operands, or an index/rank out of range.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// An iterative kernel hit its iteration cap or saw non-finite data.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file or record.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace misc
