#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mbody {

enum class ErrorCode {
  // geometry
  TooFewVertices,
  NonConvex,
  DegenerateArea,
  OutsidePolygon,
  NumericCollapse,
  // measure
  ZeroMass,
  InvalidMeasure,
  // potential
  SingularPoint,
  OnSupport,
  OnBoundary,
  NonConvergent,
  InsideShell,
  InvalidRadius,
  // skeleton
  UnsupportedBody,
  CollocationInsideBody,
  RankDeficient,
  NoConvergence,
  // verify
  SampleInsideBody,
  UnsupportedDimension,
  UnknownCase,
  // io
  ParseError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mbody
