#pragma once

#include "reri/inference.hpp"
#include "reri/multiplicative.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reri {

inline constexpr std::string_view kToolVersion = "0.3.1";

enum class DetectionMode { surface, data };

std::string_view to_string(DetectionMode m);

struct ProtectiveFlag {
    std::string factor;
    double ratio = 1.0;     // singleton rr (surface mode) or main-effects odds ratio (data mode)
    bool protective = false;
    DetectionMode mode = DetectionMode::surface;

    bool operator==(const ProtectiveFlag&) const = default;
};

struct QualitativeFinding {
    std::string factor;
    std::string context;    // term label of the other factors held present
    double rr_with = 0.0;
    double rr_without = 0.0;

    bool operator==(const QualitativeFinding&) const = default;
};

struct CoefficientRow {
    std::string term;
    double beta = 0.0;
    std::optional<double> se;
    double ratio = 1.0;
    std::optional<Interval> ratio_ci;

    bool operator==(const CoefficientRow&) const = default;
};

struct Estimate {
    std::string name;       // e.g. "RERI2(lowMD,highBMI|smoking=0)"
    std::string group;      // additive.total, additive.top, additive.absent, ...
    double value = 0.0;
    std::optional<double> se;
    std::optional<Interval> ci;

    bool operator==(const Estimate&) const = default;
};

struct FitSummary {
    std::size_t observations = 0;
    int iterations = 0;
    bool converged = false;
    double log_likelihood = 0.0;

    bool operator==(const FitSummary&) const = default;
};

struct Provenance {
    std::string source;         // "coefficients" or "data"
    std::string input_digest;   // FNV-1a 64, hex
    std::string tool_version;

    bool operator==(const Provenance&) const = default;
};

struct InteractionReport {
    std::vector<std::string> factors;
    std::vector<ProtectiveFlag> orientation;
    std::vector<std::string> recodings;
    std::vector<CoefficientRow> coefficients;
    std::vector<Estimate> estimates;
    std::vector<QualitativeFinding> qualitative;
    std::size_t qualitative_comparisons = 0;
    std::optional<ScaleRelation> scale_relation;
    std::vector<std::string> flags;
    std::optional<FitSummary> fit;
    Provenance provenance;

    const Estimate* find(std::string_view name) const;

    bool operator==(const InteractionReport&) const = default;
};

enum class ReportFormat { json, table };

ReportFormat report_format_from_string(std::string_view s);

std::string emit_report(const InteractionReport& report, ReportFormat format);
InteractionReport parse_report_json(std::string_view text);

std::string digest_hex(std::string_view bytes);

// Index names as they appear in reports.
std::string index_name(const IndexSpec& spec, const FactorSet& factors);

}  // namespace reri
