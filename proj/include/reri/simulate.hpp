#pragma once

#include "reri/lattice.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reri {

struct SimulationSpec {
    RiskSurface truth;
    double baseline_risk = 0.01;
    std::size_t cohort_size = 0;
    std::vector<double> prevalence;   // by mask, sums to 1
    std::uint64_t seed = 1;
    std::string outcome_name = "y";

    void validate() const;
};

// Pattern prevalences for independent factors with the given marginal rates.
std::vector<double> independent_prevalence(std::span<const double> factor_rates);

// Each subject draws a pattern from `prevalence`, then an event with
// probability baseline_risk * rr(pattern). Identical output for identical seeds.
DataTable simulate_cohort(const SimulationSpec& spec);

// JSON document:
//   { "factors": [...],
//     "coefficients": {...} | "relative_risks": {"x1": 2, "x1*x2": 6, ...},
//     "baseline_risk": 0.01, "cohort_size": 200000,
//     "prevalence": {"none": 0.25, "x1": ...} | "factor_prevalence": {"x1": 0.1, ...},
//     "seed": 1, "outcome": "y" }
// Missing prevalence means uniform over patterns.
SimulationSpec parse_simulation_spec(std::string_view text);

}  // namespace reri
