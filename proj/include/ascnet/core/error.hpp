#pragma once

#include <stdexcept>
#include <string>

namespace ascnet {

// Error taxonomy; `kind` maps onto CLI exit codes (config=2, runtime=3, io=4).
enum class ErrorKind {
  config,     // bad flags, invalid configuration, invalid arguments
  data,       // invalid input data (non-finite voxels, bad manifest, empty result)
  numerical,  // non-finite loss/gradient/activation
  io,         // missing files, unreadable/unwritable paths
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  int exit_code() const {
    switch (kind_) {
      case ErrorKind::config: return 2;
      case ErrorKind::data: return 2;
      case ErrorKind::numerical: return 3;
      case ErrorKind::io: return 4;
    }
    return 3;
  }

private:
  ErrorKind kind_;
};

inline Error config_error(std::string msg) { return Error(ErrorKind::config, std::move(msg)); }
inline Error data_error(std::string msg) { return Error(ErrorKind::data, std::move(msg)); }
inline Error numerical_error(std::string msg) { return Error(ErrorKind::numerical, std::move(msg)); }
inline Error io_error(std::string msg) { return Error(ErrorKind::io, std::move(msg)); }

}  // namespace ascnet
