#pragma once

#include <stdexcept>
#include <string>

namespace ia {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidFamilyParams : Error {
  using Error::Error;
};
struct DegenerateBlocks : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct EigenFailure : Error {
  using Error::Error;
};
struct UnsupportedFamily : Error {
  using Error::Error;
};
struct TooManyUsers : Error {
  using Error::Error;
};
struct SlotSolveFailed : Error {
  using Error::Error;
};
struct NotAZeroForcingSolution : Error {
  using Error::Error;
};
struct TooLarge : Error {
  using Error::Error;
};
struct BudgetExceeded : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace ia
