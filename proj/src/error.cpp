#include "unimodal/error.hpp"

namespace unimodal {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::missing_data: return "missing_data";
    case ErrorKind::dimensionality: return "dimensionality";
    case ErrorKind::empty_sample: return "empty_sample";
    case ErrorKind::degenerate_sample: return "degenerate_sample";
    case ErrorKind::degenerate_spread: return "degenerate_spread";
    case ErrorKind::unsupported_size: return "unsupported_size";
    case ErrorKind::corrupt_table: return "corrupt_table";
    case ErrorKind::calibration_curve: return "calibration_curve";
    case ErrorKind::usage: return "usage";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace unimodal
