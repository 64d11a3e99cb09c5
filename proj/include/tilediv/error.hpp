#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tilediv {

// Error classes surface verbatim in CLI diagnostics, so the names are stable.
enum class ErrorKind {
  kParse,
  kInvalidArgument,
  kDomain,
  kIo,
  kMismatch,
  kConfig,
};

constexpr std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse_error";
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kDomain: return "domain_error";
    case ErrorKind::kIo: return "io_error";
    case ErrorKind::kMismatch: return "mismatch_error";
    case ErrorKind::kConfig: return "config_error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view kind_name() const noexcept { return error_kind_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace tilediv
