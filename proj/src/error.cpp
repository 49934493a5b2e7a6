#include "mbody/error.hpp"

namespace mbody {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooFewVertices: return "TooFewVertices";
    case ErrorCode::NonConvex: return "NonConvex";
    case ErrorCode::DegenerateArea: return "DegenerateArea";
    case ErrorCode::OutsidePolygon: return "OutsidePolygon";
    case ErrorCode::NumericCollapse: return "NumericCollapse";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::InvalidMeasure: return "InvalidMeasure";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::OnSupport: return "OnSupport";
    case ErrorCode::OnBoundary: return "OnBoundary";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::InsideShell: return "InsideShell";
    case ErrorCode::InvalidRadius: return "InvalidRadius";
    case ErrorCode::UnsupportedBody: return "UnsupportedBody";
    case ErrorCode::CollocationInsideBody: return "CollocationInsideBody";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SampleInsideBody: return "SampleInsideBody";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::UnknownCase: return "UnknownCase";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace mbody
