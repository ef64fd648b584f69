#pragma once

#include <stdexcept>
#include <string>

namespace hardedge {

/// Raised when an operation is called outside its parameter domain
/// (nonpositive chi index, a <= -1, k > n, ...).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised by iterative numerics that fail to meet their stopping rule
/// (power-iteration cap, Bessel bracket search, under-resolved SDE steps).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {
inline void require(bool condition, const std::string& message) {
    if (!condition) throw DomainError(message);
}
}  // namespace detail

}  // namespace hardedge
