#include "reri/multiplicative.hpp"

#include "reri/error.hpp"

#include <cmath>

namespace reri {

double tot_i_conditional(const RiskSurface& surface, const Conditioning& cond) {
    cond.validate(surface.factor_count());
    double log_ratio = std::log(surface[cond.present | cond.active]) + (popcount(cond.active) - 1) * std::log(surface[cond.present]);
    for (int i = 0; i < surface.factor_count(); ++i) {
        if (cond.active & bit(i)) log_ratio -= std::log(surface[cond.present | bit(i)]);
    }
    return std::exp(log_ratio);
}

double tot_i(const RiskSurface& surface) {
    double denom = 1.0;
    for (int i = 0; i < surface.factor_count(); ++i) denom *= surface[bit(i)];
    return surface[surface.all()] / denom;
}

namespace {

void require_saturated(const CoefficientTable& coeffs) {
    if (!coeffs.saturated()) throw InputError("multiplicative indices need a saturated coefficient table");
}

}  // namespace

double i_top(const CoefficientTable& coeffs) {
    require_saturated(coeffs);
    return std::exp(coeffs[full_mask(coeffs.factor_count())]);
}

double i_conditional(const CoefficientTable& coeffs, const Conditioning& cond) {
    require_saturated(coeffs);
    cond.validate(coeffs.factor_count());
    double sum = 0.0;
    for_each_submask(cond.present, [&](Mask u) { sum += coeffs[cond.active | u]; });
    return std::exp(sum);
}

double i_conditional(const RiskSurface& surface, const Conditioning& cond) {
    cond.validate(surface.factor_count());
    const int top = popcount(cond.active);
    double sum = 0.0;
    for_each_submask(cond.active, [&](Mask s) {
        const double l = std::log(surface[cond.present | s]);
        sum += ((top - popcount(s)) % 2 == 0) ? l : -l;
    });
    return std::exp(sum);
}

ScaleRelation scale_relation_check(const RiskSurface& surface) {
    ScaleRelation out;
    out.tot_i = tot_i(surface);
    out.tot_reri = tot_reri(surface);
    out.super_multiplicative = out.tot_i >= 1.0;
    out.super_additive = out.tot_reri > 0.0;
    out.applicable = true;
    for (int i = 0; i < surface.factor_count(); ++i) {
        if (!(surface[bit(i)] > 1.0)) out.applicable = false;
    }
    if (!out.applicable) return out;
    if (out.super_multiplicative && !out.super_additive) {
        out.violations.push_back("TotI >= 1 but TotRERI <= 0");
    }
    if (out.tot_reri <= 0.0 && !(out.tot_i < 1.0)) {
        out.violations.push_back("TotRERI <= 0 but TotI >= 1");
    }
    return out;
}

}  // namespace reri
