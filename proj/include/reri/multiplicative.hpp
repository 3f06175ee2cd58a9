#pragma once

#include "reri/additive.hpp"

#include <string>
#include <vector>

namespace reri {

// rr(all) / prod_i rr({i}).
double tot_i(const RiskSurface& surface);
// Same ratio inside stratum P: rr(P+A) rr(P)^{|A|-1} / prod_{i in A} rr(P+i).
double tot_i_conditional(const RiskSurface& surface, const Conditioning& cond);

// exp(beta of the n-way product term).
double i_top(const CoefficientTable& coeffs);

// exp(sum of beta_T over A within T within A u P): the |A|-way multiplicative
// interaction inside stratum P.
double i_conditional(const CoefficientTable& coeffs, const Conditioning& cond);
// Same quantity from relative risks: exp of the log-scale inclusion-exclusion.
double i_conditional(const RiskSurface& surface, const Conditioning& cond);

struct ScaleRelation {
    bool applicable = false;   // every singleton rr > 1
    double tot_i = 0.0;
    double tot_reri = 0.0;
    bool super_multiplicative = false;   // tot_i >= 1
    bool super_additive = false;         // tot_reri > 0
    std::vector<std::string> violations;

    bool operator==(const ScaleRelation&) const = default;
};

// Checks "tot_i >= 1 implies tot_reri > 0" and "tot_reri <= 0 implies tot_i < 1".
ScaleRelation scale_relation_check(const RiskSurface& surface);

}  // namespace reri
