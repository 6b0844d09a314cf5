#include "spx/error.hpp"

namespace spx {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Tiling: return "tiling";
    case ErrorKind::Bounds: return "bounds";
    case ErrorKind::Consistency: return "consistency";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::Config: return "config";
    case ErrorKind::Data: return "data";
    case ErrorKind::Load: return "load";
    case ErrorKind::Resize: return "resize";
    case ErrorKind::Io: return "io";
    case ErrorKind::Numeric: return "numeric";
  }
  return "unknown";
}

namespace {
std::string single_line(ErrorKind kind, const std::string& message) {
  std::string out(to_string(kind));
  out += ": ";
  for (char c : message) out += (c == '\n' || c == '\r') ? ' ' : c;
  return out;
}
}  // namespace

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(single_line(kind, message)), kind_(kind) {}

}  // namespace spx
