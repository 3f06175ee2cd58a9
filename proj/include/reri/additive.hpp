#pragma once

#include "reri/lattice.hpp"

#include <string>
#include <vector>

namespace reri {

// Splits the factors into an active set A (the interacting factors), a set P
// held present and a set Z held absent.
struct Conditioning {
    Mask active = 0;
    Mask present = 0;
    Mask absent = 0;

    // Validates disjointness, full cover of n factors and |A| >= 2.
    static Conditioning make(int n, Mask active, Mask present);
    static Conditioning full(int n) { return make(n, full_mask(n), 0); }
    void validate(int n) const;

    bool operator==(const Conditioning&) const = default;
};

enum class ProtectivePolicy { recode, warn, error };

// Index computations assume risk factors. A singleton rr < 1 is reported to
// `warnings` (policy warn/recode) or raises InputError (policy error).
struct GuardOptions {
    ProtectivePolicy policy = ProtectivePolicy::warn;
    std::vector<std::string>* warnings = nullptr;
};

void guard_protective(const RiskSurface& surface, const GuardOptions& guard);

// Signed inclusion-exclusion over {S : P within S within P u A}, without
// standardization. Defined for any |A| including 0 and 1.
double sublattice_contrast(const RiskSurface& surface, Mask active, Mask present);

// rr(all) - sum_i rr({i}) + (n - 1).
double tot_reri(const RiskSurface& surface, const GuardOptions& guard = {});
// Total deviation from additivity of A inside the stratum P, standardized by rr(P).
double tot_reri_conditional(const RiskSurface& surface, const Conditioning& cond, const GuardOptions& guard = {});

// sum over all patterns S of (-1)^{n-|S|} rr(S).
double reri_n(const RiskSurface& surface, const GuardOptions& guard = {});
// Inclusion-exclusion over A inside stratum P divided by rr(P).
double reri_conditional(const RiskSurface& surface, const Conditioning& cond, const GuardOptions& guard = {});

// Top-order RERI obtained by recursively subtracting every lower-order
// conditional (others absent) RERI from the total; bottoms out at two factors.
// Exponential cost, limited to n <= 8.
double reri_recursive_oracle(const RiskSurface& surface);

inline constexpr int kOracleMaxFactors = 8;

// Lower-order conditionings with |A| from n-1 down to 2, active sets in
// canonical order. Absent group: every other factor absent. Present group:
// every other factor present.
std::vector<Conditioning> conditionings_absent(int n);
std::vector<Conditioning> conditionings_present(int n);
// Every valid conditioning with |A| < n (all present/absent splits).
std::vector<Conditioning> conditionings_all(int n);

}  // namespace reri
