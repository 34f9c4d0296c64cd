// Error taxonomy shared by all modules.
#pragma once

#include <stdexcept>
#include <string>

namespace wcurve {

enum class ErrorCode {
    // semigroup
    NotCofinite,
    DegenerateGenusZero,
    // curve / basis
    DegreeBoundViolated,
    NotCoprime,
    CancellationDetected,
    BasisGapUnfillable,
    DenominatorSearchExhausted,
    PoleAtPoint,
    NearBranchPoint,
    UnsupportedSingularity,
    // fs_mu
    DegenerateDivisor,
    // riemann_theta
    TruncationBudgetExceeded,
    // periods_abel
    BranchClearanceViolated,
    RankDeficientHomology,
    QuadratureBudgetExceeded,
    TauNotSymmetric,
    PathCrossesBranchCut,
    VanishingTestFailed,
    CharacteristicSearchSkipped,
    // inversion
    DegenerateConfiguration,
    SpecialDivisor,
    ThetaDenominatorVanishes,
    HessianUnavailable,
    // io
    ConfigParseError,
    ShapeMismatch,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::NotCofinite: return "NotCofinite";
        case ErrorCode::DegenerateGenusZero: return "DegenerateGenusZero";
        case ErrorCode::DegreeBoundViolated: return "DegreeBoundViolated";
        case ErrorCode::NotCoprime: return "NotCoprime";
        case ErrorCode::CancellationDetected: return "CancellationDetected";
        case ErrorCode::BasisGapUnfillable: return "BasisGapUnfillable";
        case ErrorCode::DenominatorSearchExhausted: return "DenominatorSearchExhausted";
        case ErrorCode::PoleAtPoint: return "PoleAtPoint";
        case ErrorCode::NearBranchPoint: return "NearBranchPoint";
        case ErrorCode::UnsupportedSingularity: return "UnsupportedSingularity";
        case ErrorCode::DegenerateDivisor: return "DegenerateDivisor";
        case ErrorCode::TruncationBudgetExceeded: return "TruncationBudgetExceeded";
        case ErrorCode::BranchClearanceViolated: return "BranchClearanceViolated";
        case ErrorCode::RankDeficientHomology: return "RankDeficientHomology";
        case ErrorCode::QuadratureBudgetExceeded: return "QuadratureBudgetExceeded";
        case ErrorCode::TauNotSymmetric: return "TauNotSymmetric";
        case ErrorCode::PathCrossesBranchCut: return "PathCrossesBranchCut";
        case ErrorCode::VanishingTestFailed: return "VanishingTestFailed";
        case ErrorCode::CharacteristicSearchSkipped: return "CharacteristicSearchSkipped";
        case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
        case ErrorCode::SpecialDivisor: return "SpecialDivisor";
        case ErrorCode::ThetaDenominatorVanishes: return "ThetaDenominatorVanishes";
        case ErrorCode::HessianUnavailable: return "HessianUnavailable";
        case ErrorCode::ConfigParseError: return "ConfigParseError";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    }
    return "UnknownError";
}

/// Exception carrying a machine-readable code plus a human-readable detail.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
          code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& detail) {
    throw Error(code, detail);
}

} // namespace wcurve
