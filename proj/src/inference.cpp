#include "reri/inference.hpp"

#include "reri/error.hpp"
#include "reri/multiplicative.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace reri {

std::string_view to_string(IndexKind k) {
    switch (k) {
    case IndexKind::tot_reri: return "TotRERI";
    case IndexKind::reri: return "RERI";
    case IndexKind::tot_i: return "TotI";
    case IndexKind::i: return "I";
    }
    return "?";
}

namespace {

// log rr(pattern) = <w_pattern, beta> with w_pattern = 1 on every nonempty subset.
void accumulate_pattern(std::map<Mask, int>& acc, Mask pattern, int scale) {
    for_each_submask(pattern, [&](Mask t) {
        if (t != 0) acc[t] += scale;
    });
}

TermWeights finish(const std::map<Mask, int>& acc) {
    TermWeights out;
    for (auto [m, w] : acc) {
        if (w != 0) out.emplace_back(m, w);
    }
    return out;
}

TermWeights pattern_weights(Mask pattern) {
    std::map<Mask, int> acc;
    accumulate_pattern(acc, pattern, 1);
    return finish(acc);
}

void add_rr(IndexExpression& e, int sign, Mask pattern) {
    if (pattern == 0) {
        e.constant += sign;
        return;
    }
    e.terms.push_back({sign, pattern_weights(pattern)});
}

double inner(const TermWeights& w, std::span<const double> beta) {
    double u = 0.0;
    for (auto [m, k] : w) u += k * beta[m];
    return u;
}

}  // namespace

IndexExpression build_expression(const IndexSpec& spec, int n) {
    require_factor_count(n);
    const auto& c = spec.cond;
    c.validate(n);
    IndexExpression e;
    e.factor_count = n;
    switch (spec.kind) {
    case IndexKind::tot_reri: {
        add_rr(e, +1, c.present | c.active);
        for (int i = 0; i < n; ++i) {
            if (c.active & bit(i)) add_rr(e, -1, c.present | bit(i));
        }
        for (int k = 1; k < popcount(c.active); ++k) add_rr(e, +1, c.present);
        e.denominator = pattern_weights(c.present);
        break;
    }
    case IndexKind::reri: {
        const int top = popcount(c.active);
        std::vector<Mask> subs;
        for_each_submask(c.active, [&](Mask s) { subs.push_back(s); });
        for (Mask s : subs) add_rr(e, ((top - popcount(s)) % 2 == 0) ? +1 : -1, c.present | s);
        e.denominator = pattern_weights(c.present);
        break;
    }
    case IndexKind::tot_i: {
        std::map<Mask, int> acc;
        accumulate_pattern(acc, c.present | c.active, 1);
        accumulate_pattern(acc, c.present, popcount(c.active) - 1);
        for (int i = 0; i < n; ++i) {
            if (c.active & bit(i)) accumulate_pattern(acc, c.present | bit(i), -1);
        }
        e.terms.push_back({+1, finish(acc)});
        break;
    }
    case IndexKind::i: {
        std::map<Mask, int> acc;
        for_each_submask(c.present, [&](Mask u) { acc[c.active | u] += 1; });
        e.terms.push_back({+1, finish(acc)});
        break;
    }
    }
    return e;
}

double IndexExpression::evaluate(std::span<const double> beta) const {
    double num = constant;
    for (const auto& t : terms) num += t.sign * std::exp(inner(t.weights, beta));
    return num / std::exp(inner(denominator, beta));
}

std::vector<double> IndexExpression::gradient(std::span<const double> beta) const {
    std::vector<double> g(lattice_size(factor_count), 0.0);
    const double denom = std::exp(inner(denominator, beta));
    double num = constant;
    for (const auto& t : terms) {
        const double e = t.sign * std::exp(inner(t.weights, beta));
        num += e;
        for (auto [m, k] : t.weights) g[m] += k * e / denom;
    }
    const double f = num / denom;
    for (auto [m, k] : denominator) g[m] -= f * k;
    return g;
}

double evaluate_index(const IndexSpec& spec, const RiskSurface& surface) {
    switch (spec.kind) {
    case IndexKind::tot_reri: return tot_reri_conditional(surface, spec.cond);
    case IndexKind::reri: return reri_conditional(surface, spec.cond);
    case IndexKind::tot_i: return tot_i_conditional(surface, spec.cond);
    case IndexKind::i: return i_conditional(surface, spec.cond);
    }
    return 0.0;
}

DeltaResult delta_variance(const IndexExpression& expr, const CoefficientTable& coeffs, const CovarianceBlock& cov) {
    if (coeffs.factor_count() != expr.factor_count) throw InputError("expression and coefficients differ in factor count");
    std::set<Mask> support;
    for (const auto& t : expr.terms) {
        for (auto [m, k] : t.weights) support.insert(m);
    }
    for (auto [m, k] : expr.denominator) support.insert(m);
    for (Mask m : support) {
        if (!cov.position(m)) {
            throw InputError("covariance dimension mismatch: term " + coeffs.factors().term_label(m) + " not covered");
        }
    }
    const auto& s = cov.matrix();
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw InputError("covariance is not symmetric");
    }

    const auto beta = coeffs.by_mask();
    const auto grad = expr.gradient(beta);
    Eigen::VectorXd g(static_cast<Eigen::Index>(cov.dimension()));
    for (std::size_t r = 0; r < cov.dimension(); ++r) g(static_cast<Eigen::Index>(r)) = grad[cov.terms()[r]];
    double var = g.dot(s * g);
    if (var < -1e-12) throw NumericalError("delta-method variance is negative; covariance is not positive semidefinite");
    return {expr.evaluate(beta), std::max(var, 0.0)};
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("quantile probability must lie in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

Interval confidence_interval(double estimate, double variance, double level) {
    if (variance < 0.0 || !std::isfinite(variance)) throw InputError("variance must be finite and non-negative");
    if (!(level > 0.0 && level < 1.0)) throw InputError("confidence level must lie in (0, 1)");
    const double half = normal_quantile(0.5 + level / 2.0) * std::sqrt(variance);
    return {estimate - half, estimate + half};
}

}  // namespace reri
