#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spx {

enum class ErrorKind {
  Parameter,
  Tiling,
  Bounds,
  Consistency,
  Shape,
  Geometry,
  Config,
  Data,
  Load,
  Resize,
  Io,
  Numeric,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this type. what() is a single
// line of the form "<kind>: <message>" so the CLI can forward it verbatim.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace spx
