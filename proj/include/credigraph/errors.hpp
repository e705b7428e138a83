#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace credigraph {

// Base of every error the library throws. The CLI maps InputError subclasses
// to exit code 1 and anything else to 2.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
   public:
    using Error::Error;
};

// Malformed or wrong-version file contents.
class FormatError : public InputError {
   public:
    using InputError::InputError;
};

class IoError : public InputError {
   public:
    using InputError::InputError;
};

// Invalid argument values (thresholds, dimensions, ratios).
class ParameterError : public InputError {
   public:
    using InputError::InputError;
};

// Inconsistent data: ids out of range, features missing for labeled nodes.
class DataError : public InputError {
   public:
    using InputError::InputError;
};

class CorruptInputError : public DataError {
   public:
    CorruptInputError(const std::string& what, std::uint64_t offset)
        : DataError(what + " (offset " + std::to_string(offset) + ")"), offset_(offset) {}
    [[nodiscard]] std::uint64_t offset() const noexcept { return offset_; }

   private:
    std::uint64_t offset_;
};

// Embedding provider disagreed with the configured contract.
class ProviderError : public Error {
   public:
    using Error::Error;
};

}  // namespace credigraph
