#include "reri/screening.hpp"

#include "reri/error.hpp"
#include "reri/model_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace reri {

QualitativeScreen qualitative_violations(const RiskSurface& surface, double epsilon) {
    if (!(epsilon >= 0.0)) throw InputError("qualitative tolerance must be non-negative");
    const int n = surface.factor_count();
    QualitativeScreen out;
    for (int i = 0; i < n; ++i) {
        const Mask b = bit(i);
        for (Mask s = 0; s <= surface.all(); ++s) {
            if (s & b) continue;
            ++out.comparisons;
            const double with = surface[s | b];
            const double without = surface[s];
            if (with - without <= epsilon) out.violations.push_back({i, {s}, with, without});
        }
    }
    return out;
}

std::vector<ProtectiveFlag> detect_protective(const RiskSurface& surface) {
    std::vector<ProtectiveFlag> out;
    for (int i = 0; i < surface.factor_count(); ++i) {
        const double rr = surface[bit(i)];
        out.push_back({surface.factors().name(i), rr, rr < 1.0, DetectionMode::surface});
    }
    return out;
}

std::vector<ProtectiveFlag> detect_protective(const DataTable& data, const FitOptions& options) {
    FitOptions main_effects = options;
    main_effects.saturated = false;
    const FitResult fit = fit_logistic(data, main_effects);
    std::vector<ProtectiveFlag> out;
    for (int i = 0; i < data.factors.size(); ++i) {
        const double ratio = std::exp(fit.coefficients[bit(i)]);
        out.push_back({data.factors.name(i), ratio, ratio < 1.0, DetectionMode::data});
    }
    return out;
}

DataTable recode_data(const DataTable& data, std::span<const int> factors) {
    DataTable out = data;
    for (int i : factors) {
        if (i < 0 || i >= data.factors.size()) throw InputError("factor index out of range");
        for (auto& v : out.exposures[static_cast<std::size_t>(i)]) v = v ? 0 : 1;
    }
    return out;
}

namespace {

template <class F>
auto run_step(int number, const char* name, F&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        const std::string msg = "step " + std::to_string(number) + " (" + name + "): " + e.what();
        if (e.kind() == ErrorKind::input) throw InputError(msg);
        throw NumericalError(msg);
    }
}

std::string recoded_name(const std::string& name) { return "not_" + name; }

std::string format_ratio(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

struct Working {
    CoefficientTable coeffs;
    std::optional<CovarianceBlock> cov;
};

std::string protective_message(const ProtectiveFlag& f) {
    return "factor '" + f.factor + "' looks protective (" + std::string(to_string(f.mode)) + " ratio " + format_ratio(f.ratio) +
           " < 1)";
}

// Recodes flagged factors on the coefficient scale until no singleton rr is
// below 1. Interactions can move other singletons below 1 after a flip, so
// this repeats; a bounded number of rounds guards against cycles.
void orient_coefficients(Working& w, InteractionReport& report, const PipelineOptions& options) {
    const int n = w.coeffs.factor_count();
    auto flags = detect_protective(surface_from_coefficients(w.coeffs));
    report.orientation = flags;
    bool any = false;
    for (const auto& f : flags) any = any || f.protective;
    if (!any) return;
    if (options.protective == ProtectivePolicy::error) {
        for (const auto& f : flags) {
            if (f.protective) throw InputError(protective_message(f));
        }
    }
    if (options.protective == ProtectivePolicy::warn) {
        for (const auto& f : flags) {
            if (f.protective) report.flags.push_back(protective_message(f) + "; indices computed without recoding");
        }
        return;
    }
    for (int round = 0; round <= n; ++round) {
        bool flipped = false;
        for (int i = 0; i < n; ++i) {
            if (flags[static_cast<std::size_t>(i)].protective) {
                const std::string old_name = w.coeffs.factors().name(i);
                const std::string new_name =
                    old_name.rfind("not_", 0) == 0 ? old_name.substr(4) : recoded_name(old_name);
                w.coeffs = flip_coefficients(w.coeffs, i);
                if (w.cov) w.cov = flip_covariance(*w.cov, n, i);
                auto renamed = w.coeffs.factors().with_name(i, new_name).with_orientation(i, Orientation::risk);
                std::vector<double> beta(w.coeffs.by_mask().begin(), w.coeffs.by_mask().end());
                w.coeffs = CoefficientTable(renamed, std::move(beta), w.coeffs.saturated());
                report.recodings.push_back(old_name + " -> " + new_name + " (x = 1 - z)");
                flipped = true;
            }
        }
        if (!flipped) return;
        flags = detect_protective(surface_from_coefficients(w.coeffs));
        bool remaining = false;
        for (const auto& f : flags) remaining = remaining || f.protective;
        if (!remaining) return;
    }
    report.flags.push_back("recoding did not reach an all-risk orientation; singleton ratios keep crossing 1 across strata");
}

CoefficientRow coefficient_row(const CoefficientTable& coeffs, const std::optional<CovarianceBlock>& cov, Mask term, double z) {
    CoefficientRow row;
    row.term = coeffs.factors().term_label(term);
    row.beta = coeffs[term];
    row.ratio = std::exp(row.beta);
    if (cov && cov->position(term)) {
        const double se = std::sqrt(cov->variance(term));
        row.se = se;
        row.ratio_ci = Interval{std::exp(row.beta - z * se), std::exp(row.beta + z * se)};
    }
    return row;
}

Estimate estimate(const IndexSpec& spec, const std::string& group, const RiskSurface& surface, const Working& w,
                  const PipelineOptions& options) {
    Estimate e;
    e.name = index_name(spec, surface.factors());
    e.group = group;
    e.value = evaluate_index(spec, surface);
    if (!w.cov) return e;
    const auto expr = build_expression(spec, surface.factor_count());
    const auto delta = delta_variance(expr, w.coeffs, *w.cov);
    e.se = std::sqrt(delta.variance);
    e.ci = confidence_interval(e.value, delta.variance, options.level);
    return e;
}

void qualitative_step(const RiskSurface& surface, InteractionReport& report, double epsilon) {
    const auto screen = qualitative_violations(surface, epsilon);
    report.qualitative_comparisons = screen.comparisons;
    for (const auto& v : screen.violations) {
        report.qualitative.push_back(
            {surface.factors().name(v.factor), surface.factors().term_label(v.context.bits), v.rr_with, v.rr_without});
    }
}

std::string coefficient_digest(const CoefficientTable& coeffs) {
    std::string text;
    for (const auto& name : coeffs.factors().names()) text += name + ";";
    for (double b : coeffs.canonical()) {
        char buf[32];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), b);
        text.append(buf, ptr);
        text += ';';
    }
    return digest_hex(text);
}

void fill_indices(const Working& w, InteractionReport& report, const PipelineOptions& options) {
    const int n = w.coeffs.factor_count();
    const RiskSurface surface = run_step(3, "surface", [&] { return surface_from_coefficients(w.coeffs); });
    const auto full = Conditioning::full(n);

    run_step(3, "TotRERI", [&] {
        report.estimates.push_back(estimate({IndexKind::tot_reri, full}, "additive.total", surface, w, options));
        return 0;
    });
    run_step(4, "RERI", [&] {
        report.estimates.push_back(estimate({IndexKind::reri, full}, "additive.top", surface, w, options));
        return 0;
    });

    const bool list_conditionals = n <= options.max_conditional_factors;
    if (!list_conditionals) {
        report.flags.push_back("conditional indices skipped: " + std::to_string(n) + " factors exceeds the listing limit of " +
                               std::to_string(options.max_conditional_factors));
    }
    auto conditional_rows = [&](const std::vector<Conditioning>& conds, IndexKind total, IndexKind top, const std::string& group) {
        for (const auto& c : conds) {
            if (popcount(c.active) >= 3) report.estimates.push_back(estimate({total, c}, group, surface, w, options));
            report.estimates.push_back(estimate({top, c}, group, surface, w, options));
        }
    };
    if (list_conditionals) {
        run_step(5, "conditional RERI, others absent", [&] {
            conditional_rows(conditionings_absent(n), IndexKind::tot_reri, IndexKind::reri, "additive.absent");
            return 0;
        });
        run_step(6, "conditional RERI, others present", [&] {
            conditional_rows(conditionings_present(n), IndexKind::tot_reri, IndexKind::reri, "additive.present");
            return 0;
        });
    }

    run_step(7, "qualitative interaction", [&] {
        qualitative_step(surface, report, options.epsilon);
        return 0;
    });

    run_step(8, "multiplicative indices", [&] {
        report.estimates.push_back(estimate({IndexKind::tot_i, full}, "multiplicative.total", surface, w, options));
        report.estimates.push_back(estimate({IndexKind::i, full}, "multiplicative.top", surface, w, options));
        if (list_conditionals) {
            conditional_rows(conditionings_absent(n), IndexKind::tot_i, IndexKind::i, "multiplicative.absent");
            conditional_rows(conditionings_present(n), IndexKind::tot_i, IndexKind::i, "multiplicative.present");
        }
        report.scale_relation = scale_relation_check(surface);
        if (!report.scale_relation->applicable) {
            report.flags.push_back("additive/multiplicative implication theorem inapplicable: some singleton ratio <= 1");
        }
        for (const auto& v : report.scale_relation->violations) report.flags.push_back("internal consistency failure: " + v);
        return 0;
    });
}

void fill_coefficients(const Working& w, InteractionReport& report, const PipelineOptions& options) {
    const double z = normal_quantile(0.5 + options.level / 2.0);
    const int n = w.coeffs.factor_count();
    for (Mask t : canonical_terms(n)) report.coefficients.push_back(coefficient_row(w.coeffs, w.cov, t, z));
    if (!w.coeffs.saturated()) report.flags.push_back("missing product terms treated as 0 (unsaturated model)");
    if (!w.cov) report.flags.push_back("no covariance supplied; standard errors and confidence intervals omitted");
}

InteractionReport from_coefficients(const CoefficientInput& input, const PipelineOptions& options) {
    InteractionReport report;
    report.provenance = {"coefficients", options.input_digest.empty() ? coefficient_digest(input.coefficients) : options.input_digest,
                         std::string(kToolVersion)};
    Working w{input.coefficients, input.covariance};
    run_step(1, "orientation", [&] {
        orient_coefficients(w, report, options);
        return 0;
    });
    report.factors = w.coeffs.factors().names();
    run_step(2, "coefficients", [&] {
        fill_coefficients(w, report, options);
        return 0;
    });
    fill_indices(w, report, options);
    return report;
}

InteractionReport from_data(const DataTable& input, const PipelineOptions& options) {
    InteractionReport report;
    report.provenance = {"data", options.input_digest.empty() ? digest_hex(write_data_table(input)) : options.input_digest,
                         std::string(kToolVersion)};
    DataTable data = input;
    run_step(1, "orientation", [&] {
        report.orientation = detect_protective(data, options.fit);
        std::vector<int> flagged;
        for (std::size_t i = 0; i < report.orientation.size(); ++i) {
            const auto& f = report.orientation[i];
            if (!f.protective) continue;
            if (options.protective == ProtectivePolicy::error) throw InputError(protective_message(f));
            if (options.protective == ProtectivePolicy::warn) {
                report.flags.push_back(protective_message(f) + "; indices computed without recoding");
            } else {
                flagged.push_back(static_cast<int>(i));
            }
        }
        if (!flagged.empty()) {
            data = recode_data(data, flagged);
            for (int i : flagged) {
                const std::string old_name = data.factors.name(i);
                data.factors = data.factors.with_name(i, recoded_name(old_name)).with_orientation(i, Orientation::risk);
                report.recodings.push_back(old_name + " -> " + recoded_name(old_name) + " (x = 1 - z)");
            }
        }
        return 0;
    });
    report.factors = data.factors.names();

    Working w;
    run_step(2, "saturated fit", [&] {
        FitOptions fit_options = options.fit;
        fit_options.saturated = true;
        FitResult fit = fit_logistic(data, fit_options);
        report.fit = FitSummary{data.rows(), fit.iterations, fit.converged, fit.log_likelihood};
        for (auto& warning : fit.warnings) report.flags.push_back("fit: " + warning);
        w = Working{fit.coefficients, fit.covariance};
        fill_coefficients(w, report, options);
        return 0;
    });
    fill_indices(w, report, options);
    return report;
}

}  // namespace

InteractionReport run_pipeline(const PipelineInput& input, const PipelineOptions& options) {
    if (const auto* c = std::get_if<CoefficientInput>(&input)) return from_coefficients(*c, options);
    return from_data(std::get<DataTable>(input), options);
}

InteractionReport run_screening(const CoefficientTable& coeffs, const PipelineOptions& options) {
    InteractionReport report;
    report.provenance = {"coefficients", options.input_digest.empty() ? coefficient_digest(coeffs) : options.input_digest,
                         std::string(kToolVersion)};
    Working w{coeffs, std::nullopt};
    run_step(1, "orientation", [&] {
        orient_coefficients(w, report, options);
        return 0;
    });
    report.factors = w.coeffs.factors().names();
    run_step(7, "qualitative interaction", [&] {
        qualitative_step(surface_from_coefficients(w.coeffs), report, options.epsilon);
        return 0;
    });
    return report;
}

}  // namespace reri
