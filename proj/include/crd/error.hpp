#pragma once

#include <stdexcept>
#include <string>

namespace crd {

enum class Errc {
    DegenerateQuadruple,
    InfiniteCrossRatio,
    CoincidentAxisPoints,
    ZeroParameter,
    SingularMatrix,
    DegeneratePolygon,
    DegenerateCoordinates,
    ChartDomainViolation,
    EvenNForAChart,
    EvenN,
    OddN,
    WindowOrderViolation,
    WindowTooLarge,
    KOutOfRange,
    ZeroCoordinate,
    InfiniteVertexForIJK,
    InfiniteVertex,
    ScalarAxisMatrix,
    ForbiddenAlpha,
    OrbitTerminated,
    RealFieldNoFixedPoints,
    InputsNotRelated,
    EqualAlphaBeta,
    NoRealFixedPoint,
    BranchDiscontinuity,
    DenominatorVanishes,
    PoleBeta,
    ExcludedLabelValue,
    DegenerateTetrahedron,
    DegenerateV0,
    NoConvergence,
    ParseError,
};

inline const char* errc_name(Errc e) {
    switch (e) {
    case Errc::DegenerateQuadruple: return "DegenerateQuadruple";
    case Errc::InfiniteCrossRatio: return "InfiniteCrossRatio";
    case Errc::CoincidentAxisPoints: return "CoincidentAxisPoints";
    case Errc::ZeroParameter: return "ZeroParameter";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::DegeneratePolygon: return "DegeneratePolygon";
    case Errc::DegenerateCoordinates: return "DegenerateCoordinates";
    case Errc::ChartDomainViolation: return "ChartDomainViolation";
    case Errc::EvenNForAChart: return "EvenNForAChart";
    case Errc::EvenN: return "EvenN";
    case Errc::OddN: return "OddN";
    case Errc::WindowOrderViolation: return "WindowOrderViolation";
    case Errc::WindowTooLarge: return "WindowTooLarge";
    case Errc::KOutOfRange: return "KOutOfRange";
    case Errc::ZeroCoordinate: return "ZeroCoordinate";
    case Errc::InfiniteVertexForIJK: return "InfiniteVertexForIJK";
    case Errc::InfiniteVertex: return "InfiniteVertex";
    case Errc::ScalarAxisMatrix: return "ScalarAxisMatrix";
    case Errc::ForbiddenAlpha: return "ForbiddenAlpha";
    case Errc::OrbitTerminated: return "OrbitTerminated";
    case Errc::RealFieldNoFixedPoints: return "RealFieldNoFixedPoints";
    case Errc::InputsNotRelated: return "InputsNotRelated";
    case Errc::EqualAlphaBeta: return "EqualAlphaBeta";
    case Errc::NoRealFixedPoint: return "NoRealFixedPoint";
    case Errc::BranchDiscontinuity: return "BranchDiscontinuity";
    case Errc::DenominatorVanishes: return "DenominatorVanishes";
    case Errc::PoleBeta: return "PoleBeta";
    case Errc::ExcludedLabelValue: return "ExcludedLabelValue";
    case Errc::DegenerateTetrahedron: return "DegenerateTetrahedron";
    case Errc::DegenerateV0: return "DegenerateV0";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::ParseError: return "ParseError";
    }
    return "Unknown";
}

// Domain error carrying a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace crd
