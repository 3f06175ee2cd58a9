#pragma once

#include "reri/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reri {

struct CoefficientSpecOptions {
    // Missing product terms become 0 only when this is set or the document
    // itself declares "saturated": false. Main effects are always required.
    bool allow_missing_terms = false;
};

struct CoefficientSpec {
    CoefficientTable coefficients;
    std::optional<CovarianceBlock> covariance;
};

// JSON document:
//   { "factors": ["x1", "x2", ...],
//     "coefficients": {"x1": 0.36, "x1*x2": -0.27, ...},
//     "covariance": [[...], ...],            optional
//     "covariance_terms": ["x1", ...],       optional, defaults to canonical order
//     "orientation": {"x1": "risk", ...},    optional
//     "saturated": false }                   optional
// Without "covariance_terms" the matrix rows follow the canonical order of the
// terms listed under "coefficients".
CoefficientSpec parse_coefficient_spec(std::string_view text, const CoefficientSpecOptions& options = {});

// Standalone covariance file: either a bare matrix in canonical order of all
// 2^n - 1 terms, or {"terms": [...], "matrix": [[...]]}.
CovarianceBlock parse_covariance(std::string_view text, const FactorSet& factors);

struct DataTableConfig {
    std::string outcome = "y";
    std::vector<std::string> factors;       // empty: every remaining column
    std::vector<std::string> confounders;
    std::vector<std::string> categorical;   // confounders forced to categorical
};

// Comma-delimited with a header row. Numeric confounders are detected
// automatically; anything that does not parse as a number is categorical.
DataTable parse_data_table(std::string_view text, const DataTableConfig& config);

// Writes the header (outcome, factors, confounders) and one line per row.
// Numbers are printed with round-trip precision.
std::string write_data_table(const DataTable& table);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace reri
