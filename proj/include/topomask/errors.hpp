#pragma once

#include <stdexcept>
#include <string>

namespace topomask {

// Bad arguments or malformed inputs (CLI exit code 2).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Oracle size cap or similar resource limit exceeded (CLI exit code 3).
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// Overflow / non-finite intermediate (CLI exit code 4).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Attention row normalizer below threshold (CLI exit code 5).
class DegenerateRowError : public std::runtime_error {
public:
    DegenerateRowError(const std::string& what, std::size_t row)
        : std::runtime_error(what), row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

}  // namespace topomask
