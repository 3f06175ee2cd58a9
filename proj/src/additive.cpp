#include "reri/additive.hpp"

#include "reri/error.hpp"

#include <algorithm>

namespace reri {

Conditioning Conditioning::make(int n, Mask active, Mask present) {
    Conditioning c{active, present, full_mask(n) & ~(active | present)};
    c.validate(n);
    return c;
}

void Conditioning::validate(int n) const {
    const Mask all = full_mask(n);
    if ((active & present) || (active & absent) || (present & absent)) throw InputError("conditioning sets overlap");
    if ((active | present | absent) != all) throw InputError("conditioning does not cover every factor");
    if (popcount(active) < 2) throw InputError("conditioning needs at least two active factors");
}

void guard_protective(const RiskSurface& surface, const GuardOptions& guard) {
    for (int i = 0; i < surface.factor_count(); ++i) {
        const double rr = surface[bit(i)];
        if (rr >= 1.0) continue;
        std::string msg = "factor '" + surface.factors().name(i) + "' has singleton rr " + std::to_string(rr) +
                          " < 1; interaction indices assume risk factors";
        if (guard.policy == ProtectivePolicy::error) throw InputError(msg);
        if (guard.warnings) guard.warnings->push_back(std::move(msg));
    }
}

double sublattice_contrast(const RiskSurface& surface, Mask active, Mask present) {
    const int top = popcount(active);
    double sum = 0.0;
    for_each_submask(active, [&](Mask s) {
        const double rr = surface[present | s];
        sum += ((top - popcount(s)) % 2 == 0) ? rr : -rr;
    });
    return sum;
}

double tot_reri_conditional(const RiskSurface& surface, const Conditioning& cond, const GuardOptions& guard) {
    cond.validate(surface.factor_count());
    guard_protective(surface, guard);
    const double ref = surface[cond.present];
    double sum = surface[cond.present | cond.active] + (popcount(cond.active) - 1) * ref;
    for (int i = 0; i < surface.factor_count(); ++i) {
        if (cond.active & bit(i)) sum -= surface[cond.present | bit(i)];
    }
    return sum / ref;
}

double tot_reri(const RiskSurface& surface, const GuardOptions& guard) {
    return tot_reri_conditional(surface, Conditioning::full(surface.factor_count()), guard);
}

double reri_conditional(const RiskSurface& surface, const Conditioning& cond, const GuardOptions& guard) {
    cond.validate(surface.factor_count());
    guard_protective(surface, guard);
    return sublattice_contrast(surface, cond.active, cond.present) / surface[cond.present];
}

double reri_n(const RiskSurface& surface, const GuardOptions& guard) {
    guard_protective(surface, guard);
    return sublattice_contrast(surface, surface.all(), 0);
}

namespace {

// TotRERI of `active` with every other factor absent.
double total_absent(const RiskSurface& surface, Mask active) {
    double sum = surface[active] + (popcount(active) - 1);
    for (int i = 0; i < surface.factor_count(); ++i) {
        if (active & bit(i)) sum -= surface[bit(i)];
    }
    return sum;
}

double recursive_reri(const RiskSurface& surface, Mask active) {
    double value = total_absent(surface, active);
    if (popcount(active) == 2) return value;
    for_each_submask(active, [&](Mask sub) {
        if (sub != active && popcount(sub) >= 2) value -= recursive_reri(surface, sub);
    });
    return value;
}

std::vector<Mask> active_sets_descending(int n) {
    std::vector<Mask> out;
    auto terms = canonical_terms(n);
    for (int k = n - 1; k >= 2; --k) {
        for (Mask t : terms) {
            if (popcount(t) == k) out.push_back(t);
        }
    }
    return out;
}

}  // namespace

double reri_recursive_oracle(const RiskSurface& surface) {
    const int n = surface.factor_count();
    if (n > kOracleMaxFactors) {
        throw InputError("recursive oracle limited to " + std::to_string(kOracleMaxFactors) + " factors");
    }
    return recursive_reri(surface, surface.all());
}

std::vector<Conditioning> conditionings_absent(int n) {
    std::vector<Conditioning> out;
    for (Mask a : active_sets_descending(n)) out.push_back(Conditioning::make(n, a, 0));
    return out;
}

std::vector<Conditioning> conditionings_present(int n) {
    std::vector<Conditioning> out;
    for (Mask a : active_sets_descending(n)) out.push_back(Conditioning::make(n, a, full_mask(n) & ~a));
    return out;
}

std::vector<Conditioning> conditionings_all(int n) {
    std::vector<Conditioning> out;
    for (Mask a : active_sets_descending(n)) {
        const Mask rest = full_mask(n) & ~a;
        std::vector<Mask> subs;
        for_each_submask(rest, [&](Mask p) { subs.push_back(p); });
        std::sort(subs.begin(), subs.end());
        for (Mask p : subs) out.push_back(Conditioning::make(n, a, p));
    }
    return out;
}

}  // namespace reri
