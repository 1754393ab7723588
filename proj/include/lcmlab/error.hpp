#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lcmlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A request exceeds the sieve limit or a configured cap.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Sieve cache with bad magic or an inconsistent header.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Sieve cache whose length or CRC-32 does not match its contents.
class ChecksumError : public Error {
public:
    using Error::Error;
};

/// Sieve cache written by an unsupported format version.
class VersionError : public Error {
public:
    using Error::Error;
};

/// Malformed explicit set file.
class ParseError : public Error {
public:
    ParseError(const std::string& origin, std::size_t line, const std::string& what)
        : Error(origin + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A statistic that divides by S(x) was asked for on an empty set.
class EmptySetError : public Error {
public:
    using Error::Error;
};

/// The pairwise defect kernel refused a set above its element cap.
class PairwiseCapError : public CapacityError {
public:
    using CapacityError::CapacityError;
};

/// Invalid experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace lcmlab
