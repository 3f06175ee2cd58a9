#include "reri/cli.hpp"

#include "reri/error.hpp"
#include "reri/model_io.hpp"
#include "reri/screening.hpp"
#include "reri/simulate.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <map>
#include <ostream>

namespace reri::cli {

namespace {

bool verbose() {
    const char* v = std::getenv("RERI_VERBOSE");
    return v != nullptr && *v != '\0' && std::string_view(v) != "0";
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto end = s.find(',', start);
        std::string item = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

ProtectivePolicy policy_from_string(const std::string& s) {
    static const std::map<std::string, ProtectivePolicy> table = {
        {"recode", ProtectivePolicy::recode}, {"warn", ProtectivePolicy::warn}, {"error", ProtectivePolicy::error}};
    auto it = table.find(s);
    if (it == table.end()) throw InputError("unknown protective policy '" + s + "'");
    return it->second;
}

struct ReportFlags {
    std::string format = "table";
    double tolerance = 0.0;
    double level = 0.95;
    std::string protective = "recode";
};

void add_report_flags(CLI::App* cmd, ReportFlags& f) {
    cmd->add_option("--format", f.format, "Report format")->check(CLI::IsMember({"json", "table"}));
    cmd->add_option("--tolerance", f.tolerance, "Qualitative screening tolerance (epsilon)");
    cmd->add_option("--level", f.level, "Confidence level");
    cmd->add_option("--protective", f.protective, "Protective factor policy")->check(CLI::IsMember({"recode", "warn", "error"}));
}

PipelineOptions pipeline_options(const ReportFlags& f, const std::string& input_bytes) {
    PipelineOptions o;
    o.epsilon = f.tolerance;
    o.level = f.level;
    o.protective = policy_from_string(f.protective);
    o.input_digest = digest_hex(input_bytes);
    return o;
}

void write_report(const InteractionReport& report, const ReportFlags& f, std::ostream& out, std::ostream& err) {
    out << emit_report(report, report_format_from_string(f.format));
    if (verbose()) {
        err << "input digest " << report.provenance.input_digest << ", tool version " << report.provenance.tool_version << "\n";
        for (const auto& r : report.recodings) err << "recoded: " << r << "\n";
        for (const auto& flag : report.flags) err << "flag: " << flag << "\n";
    }
}

std::string usage(const CLI::App& app) { return app.help(); }

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Additive and multiplicative interaction indices for binary risk factors", "reri"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    ReportFlags analyze_flags;
    std::string coeffs_path, cov_path;
    bool allow_missing = false;
    auto* analyze = app.add_subcommand("analyze", "Run the full index pipeline on regression coefficients");
    analyze->add_option("--coeffs", coeffs_path, "Coefficient JSON file")->required();
    analyze->add_option("--cov", cov_path, "Covariance JSON file");
    analyze->add_flag("--allow-missing-terms", allow_missing, "Treat missing product terms as 0");
    add_report_flags(analyze, analyze_flags);

    ReportFlags fit_flags;
    std::string data_path, outcome = "y", factor_list, confounder_list, categorical_list;
    auto* fit = app.add_subcommand("fit", "Fit a saturated logistic model to binary data, then run the pipeline");
    fit->add_option("--data", data_path, "CSV data file")->required();
    fit->add_option("--outcome", outcome, "Outcome column");
    fit->add_option("--factors", factor_list, "Comma-separated exposure columns")->required();
    fit->add_option("--confounders", confounder_list, "Comma-separated confounder columns");
    fit->add_option("--categorical", categorical_list, "Confounders to treat as categorical");
    add_report_flags(fit, fit_flags);

    std::string spec_path, out_path;
    std::optional<std::uint64_t> seed;
    auto* simulate = app.add_subcommand("simulate", "Simulate a cohort from a known risk surface");
    simulate->add_option("--spec", spec_path, "Simulation spec JSON file")->required();
    simulate->add_option("--out", out_path, "Output CSV file")->required();
    simulate->add_option("--seed", seed, "Override the spec seed");

    ReportFlags check_flags;
    std::string check_path;
    bool check_allow_missing = false;
    auto* check = app.add_subcommand("check", "Orientation and qualitative interaction screening only");
    check->add_option("--coeffs", check_path, "Coefficient JSON file")->required();
    check->add_flag("--allow-missing-terms", check_allow_missing, "Treat missing product terms as 0");
    add_report_flags(check, check_flags);

    if (args.empty()) {
        err << usage(app);
        return kExitInput;
    }
    std::vector<std::string> argv_store{"reri"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << usage(app);
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << usage(app);
        return kExitInput;
    }

    try {
        if (analyze->parsed()) {
            const std::string text = read_file(coeffs_path);
            auto spec = parse_coefficient_spec(text, {allow_missing});
            std::string digest_input = text;
            if (!cov_path.empty()) {
                const std::string cov_text = read_file(cov_path);
                spec.covariance = parse_covariance(cov_text, spec.coefficients.factors());
                digest_input += cov_text;
            }
            const auto report = run_pipeline(CoefficientInput{spec.coefficients, spec.covariance},
                                             pipeline_options(analyze_flags, digest_input));
            write_report(report, analyze_flags, out, err);
            return kExitOk;
        }
        if (fit->parsed()) {
            const std::string text = read_file(data_path);
            DataTableConfig config;
            config.outcome = outcome;
            config.factors = split_list(factor_list);
            config.confounders = split_list(confounder_list);
            config.categorical = split_list(categorical_list);
            const auto data = parse_data_table(text, config);
            const auto report = run_pipeline(data, pipeline_options(fit_flags, text));
            write_report(report, fit_flags, out, err);
            if (report.fit && !report.fit->converged) {
                err << "error: logistic fit did not converge\n";
                return kExitNumerical;
            }
            return kExitOk;
        }
        if (simulate->parsed()) {
            auto spec = parse_simulation_spec(read_file(spec_path));
            if (seed) spec.seed = *seed;
            const auto cohort = simulate_cohort(spec);
            write_file(out_path, write_data_table(cohort));
            out << "wrote " << cohort.rows() << " rows to " << out_path << "\n";
            return kExitOk;
        }
        if (check->parsed()) {
            const std::string text = read_file(check_path);
            const auto spec = parse_coefficient_spec(text, {check_allow_missing});
            const auto report = run_screening(spec.coefficients, pipeline_options(check_flags, text));
            write_report(report, check_flags, out, err);
            return kExitOk;
        }
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    }
    err << usage(app);
    return kExitInput;
}

}  // namespace reri::cli
