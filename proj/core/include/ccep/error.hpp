#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ccep {

enum class ErrorKind {
  RankDeficient,
  TooFewPeriods,
  TooManyProxies,
  UnbalancedPanel,
  MissingValue,
  DuplicateObservation,
  SchemaMismatch,
  DimensionMismatch,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a machine-readable kind so the
// command-line front end (and the Monte Carlo engine) can classify it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ccep
