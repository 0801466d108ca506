#pragma once

#include <stdexcept>
#include <string>

namespace flpxr {

// Error taxonomy mirrored by the CLI exit codes:
//   ConfigError -> 2, IoError -> 3, InsufficientDataError -> 4,
//   FormatError / SchemaError -> 5. InvalidInput marks contract
// violations (bad argument to a library call) and maps to 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct InsufficientDataError : Error {
  using Error::Error;
};

// Model file is unreadable as the documented format. `section` names the
// part of the file that failed to parse.
struct FormatError : Error {
  explicit FormatError(const std::string& section, const std::string& what)
      : Error("model format error in section '" + section + "': " + what),
        section(section) {}
  std::string section;
};

// Input does not match the schema a model was trained with.
struct SchemaError : Error {
  using Error::Error;
};

}  // namespace flpxr
