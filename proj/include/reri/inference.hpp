#pragma once

#include "reri/additive.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace reri {

enum class IndexKind { tot_reri, reri, tot_i, i };

std::string_view to_string(IndexKind k);

struct IndexSpec {
    IndexKind kind = IndexKind::reri;
    Conditioning cond;

    bool operator==(const IndexSpec&) const = default;
};

// Integer weights over coefficient terms, sparse and sorted by mask.
using TermWeights = std::vector<std::pair<Mask, int>>;

struct ExpTerm {
    int sign = 1;
    TermWeights weights;
};

// (sum_k sign_k exp(<w_k, beta>) + constant) / exp(<w_0, beta>)
// Every additive and multiplicative index has this form.
struct IndexExpression {
    int factor_count = 0;
    std::vector<ExpTerm> terms;
    double constant = 0.0;
    TermWeights denominator;

    double evaluate(std::span<const double> beta) const;
    // Analytic gradient, dense by mask (entry 0 unused).
    std::vector<double> gradient(std::span<const double> beta) const;
};

IndexExpression build_expression(const IndexSpec& spec, int n);

// The same index computed directly on relative risks (or coefficients, for I).
double evaluate_index(const IndexSpec& spec, const RiskSurface& surface);

struct DeltaResult {
    double estimate = 0.0;
    double variance = 0.0;
};

// Delta-method variance g' S g. Throws InputError when the gradient touches a
// term the covariance block does not cover, NumericalError when the variance
// is below -1e-12.
DeltaResult delta_variance(const IndexExpression& expr, const CoefficientTable& coeffs, const CovarianceBlock& cov);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    bool operator==(const Interval&) const = default;
};

double normal_quantile(double p);

// Wald interval estimate +/- z * sqrt(variance).
Interval confidence_interval(double estimate, double variance, double level = 0.95);

}  // namespace reri
