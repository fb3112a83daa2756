#include "segconf/error.hpp"

namespace segconf {

std::string_view to_string(ProtocolErrorKind kind) {
  switch (kind) {
    case ProtocolErrorKind::launch_failed: return "launch_failed";
    case ProtocolErrorKind::nonzero_exit: return "nonzero_exit";
    case ProtocolErrorKind::missing_status: return "missing_status";
    case ProtocolErrorKind::malformed_status: return "malformed_status";
    case ProtocolErrorKind::status_error: return "status_error";
    case ProtocolErrorKind::missing_output: return "missing_output";
    case ProtocolErrorKind::malformed_output: return "malformed_output";
    case ProtocolErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ProtocolErrorKind::out_of_range_value: return "out_of_range_value";
  }
  return "unknown";
}

}  // namespace segconf
