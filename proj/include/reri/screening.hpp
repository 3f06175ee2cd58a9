#pragma once

#include "reri/fit.hpp"
#include "reri/report.hpp"

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace reri {

struct QualitativeViolation {
    int factor = 0;
    ExposurePattern context;    // other factors present; never contains `factor`
    double rr_with = 0.0;
    double rr_without = 0.0;
};

struct QualitativeScreen {
    std::vector<QualitativeViolation> violations;
    std::size_t comparisons = 0;
};

// For every factor i and every pattern S of the other factors, a violation is
// rr(S + i) - rr(S) <= epsilon.
QualitativeScreen qualitative_violations(const RiskSurface& surface, double epsilon = 0.0);

// Flags factors whose singleton rr is below 1.
std::vector<ProtectiveFlag> detect_protective(const RiskSurface& surface);
// Fits a main-effects-only logistic model and flags odds ratios below 1.
std::vector<ProtectiveFlag> detect_protective(const DataTable& data, const FitOptions& options = {});

// Replaces exposure z by 1 - z in the given factor columns.
DataTable recode_data(const DataTable& data, std::span<const int> factors);

struct CoefficientInput {
    CoefficientTable coefficients;
    std::optional<CovarianceBlock> covariance;
};

using PipelineInput = std::variant<CoefficientInput, DataTable>;

struct PipelineOptions {
    double epsilon = 0.0;
    ProtectivePolicy protective = ProtectivePolicy::recode;
    double level = 0.95;
    FitOptions fit;
    // Conditional listings grow like 2^n rows; above this they are skipped
    // and a flag is raised.
    int max_conditional_factors = 12;
    std::string input_digest;
};

// Runs the recommended analysis in order: orientation check and recoding,
// coefficients (fitted or given), TotRERI, RERI, conditional RERIs with the
// other factors absent then present, qualitative screen, multiplicative
// indices. Errors carry the step that raised them.
InteractionReport run_pipeline(const PipelineInput& input, const PipelineOptions& options = {});

// Orientation and qualitative checks only.
InteractionReport run_screening(const CoefficientTable& coeffs, const PipelineOptions& options = {});

}  // namespace reri
