#pragma once

#include <stdexcept>
#include <string>

namespace textmill {

// Invalid configuration or manifest. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable/unwritable files and other fatal runtime failures. Exit code 1.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace textmill
