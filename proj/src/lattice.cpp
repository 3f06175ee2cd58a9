#include "reri/lattice.hpp"

#include "reri/error.hpp"

#include <cmath>

namespace reri {

RiskSurface::RiskSurface(FactorSet factors, std::vector<double> rr) : factors_(std::move(factors)), rr_(std::move(rr)) {
    if (rr_.size() != lattice_size(factors_.size())) throw InputError("risk surface length does not match 2^n");
    if (rr_[0] != 1.0) throw InputError("reference pattern must have rr exactly 1");
    for (Mask m = 1; m < rr_.size(); ++m) {
        if (!std::isfinite(rr_[m]) || rr_[m] <= 0.0) {
            throw InputError("rr of pattern " + factors_.term_label(m) + " must be finite and positive");
        }
    }
}

void zeta_transform(std::span<double> values, int n) {
    for (int i = 0; i < n; ++i) {
        const Mask b = bit(i);
        for (Mask m = 0; m < values.size(); ++m) {
            if (m & b) values[m] += values[m ^ b];
        }
    }
}

void moebius_transform(std::span<double> values, int n) {
    for (int i = 0; i < n; ++i) {
        const Mask b = bit(i);
        for (Mask m = 0; m < values.size(); ++m) {
            if (m & b) values[m] -= values[m ^ b];
        }
    }
}

RiskSurface surface_from_coefficients(const CoefficientTable& coeffs) {
    const int n = coeffs.factor_count();
    std::vector<double> log_rr(coeffs.by_mask().begin(), coeffs.by_mask().end());
    zeta_transform(log_rr, n);
    for (Mask m = 0; m < log_rr.size(); ++m) {
        log_rr[m] = std::exp(log_rr[m]);
        if (!std::isfinite(log_rr[m]) || log_rr[m] <= 0.0) {
            throw NumericalError("relative risk of pattern " + coeffs.factors().term_label(m) + " overflows");
        }
    }
    log_rr[0] = 1.0;
    return RiskSurface(coeffs.factors(), std::move(log_rr));
}

CoefficientTable coefficients_from_surface(const RiskSurface& surface) {
    const int n = surface.factor_count();
    std::vector<double> beta(surface.values().size());
    for (Mask m = 0; m < beta.size(); ++m) beta[m] = std::log(surface[m]);
    moebius_transform(beta, n);
    beta[0] = 0.0;
    return CoefficientTable(surface.factors(), std::move(beta), true);
}

namespace {

Orientation flipped(Orientation o) {
    switch (o) {
    case Orientation::risk: return Orientation::protective;
    case Orientation::protective: return Orientation::risk;
    case Orientation::unknown: return Orientation::unknown;
    }
    return o;
}

void require_index(int i, int n) {
    if (i < 0 || i >= n) throw InputError("factor index " + std::to_string(i) + " out of range");
}

}  // namespace

RiskSurface flip_factor(const RiskSurface& surface, int i) {
    require_index(i, surface.factor_count());
    const Mask b = bit(i);
    const double ref = surface[b];
    std::vector<double> rr(surface.values().size());
    for (Mask m = 0; m < rr.size(); ++m) rr[m] = surface[m ^ b] / ref;
    rr[0] = 1.0;
    auto factors = surface.factors().with_orientation(i, flipped(surface.factors().orientation(i)));
    return RiskSurface(std::move(factors), std::move(rr));
}

CoefficientTable flip_coefficients(const CoefficientTable& coeffs, int i) {
    require_index(i, coeffs.factor_count());
    const Mask b = bit(i);
    std::vector<double> beta(coeffs.by_mask().size(), 0.0);
    for (Mask u = 1; u < beta.size(); ++u) beta[u] = (u & b) ? -coeffs[u] : coeffs[u] + coeffs[u | b];
    auto factors = coeffs.factors().with_orientation(i, flipped(coeffs.factors().orientation(i)));
    return CoefficientTable(std::move(factors), std::move(beta), coeffs.saturated());
}

CovarianceBlock flip_covariance(const CovarianceBlock& cov, int n, int i) {
    require_index(i, n);
    const Mask b = bit(i);
    const auto& terms = cov.terms();
    const auto d = static_cast<Eigen::Index>(terms.size());
    Eigen::MatrixXd map = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        const Mask u = terms[static_cast<std::size_t>(r)];
        if (u & b) {
            map(r, r) = -1.0;
            continue;
        }
        map(r, r) = 1.0;
        auto partner = cov.position(u | b);
        if (partner) {
            map(r, static_cast<Eigen::Index>(*partner)) = 1.0;
        } else {
            throw InputError("covariance lacks term " + std::to_string(u | b) + " needed to recode factor " +
                             std::to_string(i));
        }
    }
    Eigen::MatrixXd out = map * cov.matrix() * map.transpose();
    out = 0.5 * (out + out.transpose());
    return CovarianceBlock(terms, std::move(out));
}

}  // namespace reri
