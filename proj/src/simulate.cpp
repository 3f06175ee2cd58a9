#include "reri/simulate.hpp"

#include "reri/error.hpp"
#include "reri/model_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace reri {

void SimulationSpec::validate() const {
    const int n = truth.factor_count();
    require_factor_count(n);
    if (!(baseline_risk > 0.0 && baseline_risk < 1.0)) throw InputError("baseline risk must lie in (0, 1)");
    if (cohort_size == 0) throw InputError("cohort size must be positive");
    const double max_rr = *std::max_element(truth.values().begin(), truth.values().end());
    if (baseline_risk * max_rr > 1.0) {
        throw InputError("baseline risk times the largest rr exceeds 1 (" + std::to_string(baseline_risk * max_rr) + ")");
    }
    if (prevalence.size() != lattice_size(n)) throw InputError("prevalence must list every exposure pattern");
    double total = 0.0;
    for (double p : prevalence) {
        if (!std::isfinite(p) || p < 0.0) throw InputError("pattern prevalences must be finite and non-negative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InputError("pattern prevalences must sum to 1");
}

std::vector<double> independent_prevalence(std::span<const double> factor_rates) {
    const int n = static_cast<int>(factor_rates.size());
    require_factor_count(n);
    for (double r : factor_rates) {
        if (!(r >= 0.0 && r <= 1.0)) throw InputError("factor prevalence must lie in [0, 1]");
    }
    std::vector<double> out(lattice_size(n), 1.0);
    for (Mask m = 0; m < out.size(); ++m) {
        for (int i = 0; i < n; ++i) out[m] *= (m & bit(i)) ? factor_rates[static_cast<std::size_t>(i)] : 1.0 - factor_rates[static_cast<std::size_t>(i)];
    }
    return out;
}

namespace {

// 53-bit uniform in [0, 1), independent of the standard library's distributions.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

DataTable simulate_cohort(const SimulationSpec& spec) {
    spec.validate();
    const int n = spec.truth.factor_count();
    std::vector<double> cumulative(spec.prevalence.size());
    std::partial_sum(spec.prevalence.begin(), spec.prevalence.end(), cumulative.begin());
    // close the distribution at the last reachable pattern so rounding never selects an empty one
    std::size_t last = cumulative.size() - 1;
    while (last > 0 && spec.prevalence[last] == 0.0) --last;
    std::fill(cumulative.begin() + static_cast<std::ptrdiff_t>(last), cumulative.end(), 1.0);

    DataTable out;
    out.outcome_name = spec.outcome_name;
    out.factors = spec.truth.factors();
    out.outcome.resize(spec.cohort_size);
    out.exposures.assign(static_cast<std::size_t>(n), std::vector<std::uint8_t>(spec.cohort_size));

    std::mt19937_64 rng(spec.seed);
    for (std::size_t s = 0; s < spec.cohort_size; ++s) {
        const double u = uniform(rng);
        const auto pattern = static_cast<Mask>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        for (int i = 0; i < n; ++i) out.exposures[static_cast<std::size_t>(i)][s] = (pattern >> i) & 1u;
        out.outcome[s] = uniform(rng) < spec.baseline_risk * spec.truth[pattern] ? 1 : 0;
    }
    return out;
}

namespace {

SimulationSpec parse_document(const nlohmann::json& doc) {
    using nlohmann::json;
    if (!doc.is_object() || !doc.contains("factors")) throw InputError("simulation spec needs a \"factors\" array");

    SimulationSpec spec;
    const bool has_coeffs = doc.contains("coefficients");
    const bool has_rr = doc.contains("relative_risks");
    if (has_coeffs == has_rr) throw InputError("simulation spec needs exactly one of \"coefficients\" or \"relative_risks\"");

    if (has_coeffs) {
        json coeff_doc = {{"factors", doc["factors"]}, {"coefficients", doc["coefficients"]}, {"saturated", false}};
        spec.truth = surface_from_coefficients(parse_coefficient_spec(coeff_doc.dump()).coefficients);
    } else {
        std::vector<std::string> names = doc["factors"].get<std::vector<std::string>>();
        FactorSet factors(names);
        std::vector<double> rr(lattice_size(factors.size()), 0.0);
        rr[0] = 1.0;
        for (const auto& [label, value] : doc["relative_risks"].items()) {
            if (!value.is_number()) throw InputError("relative risk for '" + label + "' is not a number");
            rr[factors.parse_term(label)] = value.get<double>();
        }
        for (Mask m = 1; m < rr.size(); ++m) {
            if (rr[m] == 0.0) throw InputError("relative risk missing for pattern " + factors.term_label(m));
        }
        spec.truth = RiskSurface(factors, std::move(rr));
    }
    const auto& factors = spec.truth.factors();
    const int n = factors.size();

    auto number = [&](const char* key, double fallback) {
        if (!doc.contains(key)) return fallback;
        if (!doc[key].is_number()) throw InputError(std::string("\"") + key + "\" must be a number");
        return doc[key].get<double>();
    };
    spec.baseline_risk = number("baseline_risk", 0.01);
    const double size = number("cohort_size", 0.0);
    if (size < 1.0 || size != std::floor(size)) throw InputError("\"cohort_size\" must be a positive integer");
    spec.cohort_size = static_cast<std::size_t>(size);
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw InputError("\"seed\" must be a non-negative integer");
        spec.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("outcome")) spec.outcome_name = doc["outcome"].get<std::string>();

    if (doc.contains("prevalence") && doc.contains("factor_prevalence")) {
        throw InputError("give either \"prevalence\" or \"factor_prevalence\", not both");
    }
    if (doc.contains("prevalence")) {
        spec.prevalence.assign(lattice_size(n), 0.0);
        for (const auto& [label, value] : doc["prevalence"].items()) {
            const Mask m = (label == "none" || label.empty()) ? 0 : factors.parse_term(label);
            spec.prevalence[m] = value.get<double>();
        }
    } else if (doc.contains("factor_prevalence")) {
        std::vector<double> rates(static_cast<std::size_t>(n), -1.0);
        for (const auto& [label, value] : doc["factor_prevalence"].items()) {
            auto idx = factors.index_of(label);
            if (!idx) throw InputError("unknown factor '" + label + "' in factor_prevalence");
            rates[static_cast<std::size_t>(*idx)] = value.get<double>();
        }
        spec.prevalence = independent_prevalence(rates);
    } else {
        spec.prevalence.assign(lattice_size(n), 1.0 / static_cast<double>(lattice_size(n)));
    }
    spec.validate();
    return spec;
}

}  // namespace

SimulationSpec parse_simulation_spec(std::string_view text) {
    try {
        return parse_document(nlohmann::json::parse(text.begin(), text.end()));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed simulation spec: ") + e.what());
    }
}

}  // namespace reri
