#pragma once

#include "reri/model.hpp"

#include <span>
#include <vector>

namespace reri {

// Relative risk of every exposure pattern against the all-absent reference.
class RiskSurface {
public:
    RiskSurface() = default;
    // rr is indexed by mask; rr[0] must be exactly 1 and every entry finite and > 0.
    RiskSurface(FactorSet factors, std::vector<double> rr);

    const FactorSet& factors() const { return factors_; }
    int factor_count() const { return factors_.size(); }
    Mask all() const { return full_mask(factors_.size()); }

    double operator[](Mask pattern) const { return rr_[pattern]; }
    double rr(ExposurePattern p) const { return rr_[p.bits]; }
    double err(ExposurePattern p) const { return rr_[p.bits] - 1.0; }
    std::span<const double> values() const { return rr_; }

    bool operator==(const RiskSurface&) const = default;

private:
    FactorSet factors_;
    std::vector<double> rr_;
};

// rr(S) = exp(sum of beta_T over nonempty T within S).
RiskSurface surface_from_coefficients(const CoefficientTable& coeffs);

// Inverse transform: beta_T = sum over S within T of (-1)^{|T \ S|} ln rr(S).
CoefficientTable coefficients_from_surface(const RiskSurface& surface);

// In-place subset-sum transforms on a dense vector of length 2^n.
void zeta_transform(std::span<double> values, int n);
void moebius_transform(std::span<double> values, int n);

// Recodes factor i as its complement and re-references to the new all-absent
// pattern: rr'(S) = rr(S xor {i}) / rr({i}). Flips the factor's orientation.
RiskSurface flip_factor(const RiskSurface& surface, int i);

// The same recoding on coefficients. With z_i = 1 - x_i the product terms
// rearrange as beta'_U = beta_U + beta_{U+i} for U without i and
// beta'_U = -beta_U for U with i.
CoefficientTable flip_coefficients(const CoefficientTable& coeffs, int i);

// Covariance of the recoded coefficients, L * cov * L^T for the linear map above.
CovarianceBlock flip_covariance(const CovarianceBlock& cov, int n, int i);

}  // namespace reri
