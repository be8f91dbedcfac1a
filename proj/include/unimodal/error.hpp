#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace unimodal {

enum class ErrorKind {
  validation,         // non-numeric or non-finite cell, malformed input
  missing_data,       // missing values present without complete-case mode
  dimensionality,     // more than one data column
  empty_sample,       // nothing left after filtering
  degenerate_sample,  // too few observations for the operation
  degenerate_spread,  // zero standard deviation
  unsupported_size,   // sample size outside table coverage
  corrupt_table,      // checksum, version or structure mismatch on load
  calibration_curve,  // invalid calibration curve
  usage,              // bad arguments
  io,                 // file could not be opened or written
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace unimodal
