#pragma once

#include "reri/model.hpp"

#include <string>
#include <vector>

namespace reri {

struct FitOptions {
    bool saturated = true;      // all product terms; otherwise main effects only
    int max_iterations = 50;
    double tolerance = 1e-8;    // on max |score|
    int min_cell_events = 5;    // warn below this count per exposure pattern
};

struct NamedValue {
    std::string name;
    double value = 0.0;
};

struct FitResult {
    CoefficientTable coefficients;   // exposure terms only
    CovarianceBlock covariance;      // exposure block of the inverse information
    double intercept = 0.0;
    std::vector<NamedValue> confounder_coefficients;
    std::vector<std::string> columns;    // full design, intercept first
    double log_likelihood = 0.0;
    std::vector<double> log_likelihood_trace;
    double max_score = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<std::string> warnings;
};

// Logistic regression by iteratively reweighted least squares with step halving.
// Throws NumericalError naming the offending column on rank deficiency or
// separation; returns converged = false when the iteration budget runs out.
FitResult fit_logistic(const DataTable& data, const FitOptions& options = {});

}  // namespace reri
