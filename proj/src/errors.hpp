#pragma once

#include <stdexcept>
#include <string>

namespace bingo {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value (bad reference length, non-positive l_max, ...).
struct ConfigError : Error {
  using Error::Error;
};

/// Malformed input file; the message names the file and line where known.
struct ParseError : Error {
  using Error::Error;
};

/// File could not be opened, read, or written.
struct IoError : Error {
  using Error::Error;
};

/// Data violates an operation's contract (empty batch, non-monotone steps, ...).
struct DataError : Error {
  using Error::Error;
};

}  // namespace bingo
