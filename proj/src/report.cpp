#include "reri/report.hpp"

#include "reri/error.hpp"

#include <json.hpp>

#include <cstdio>

namespace reri {

using ojson = nlohmann::ordered_json;

std::string_view to_string(DetectionMode m) { return m == DetectionMode::surface ? "surface" : "data"; }

namespace {

DetectionMode mode_from_string(const std::string& s) {
    if (s == "surface") return DetectionMode::surface;
    if (s == "data") return DetectionMode::data;
    throw InputError("unknown detection mode '" + s + "'");
}

}  // namespace

ReportFormat report_format_from_string(std::string_view s) {
    if (s == "json") return ReportFormat::json;
    if (s == "table") return ReportFormat::table;
    throw InputError("unknown report format '" + std::string(s) + "' (expected json or table)");
}

const Estimate* InteractionReport::find(std::string_view name) const {
    for (const auto& e : estimates) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

std::string digest_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string index_name(const IndexSpec& spec, const FactorSet& factors) {
    const auto& c = spec.cond;
    std::string out(to_string(spec.kind));
    out += std::to_string(popcount(c.active));
    out += '(';
    bool first = true;
    for (int i = 0; i < factors.size(); ++i) {
        if (!(c.active & bit(i))) continue;
        if (!first) out += ',';
        out += factors.name(i);
        first = false;
    }
    first = true;
    for (int i = 0; i < factors.size(); ++i) {
        if (c.active & bit(i)) continue;
        out += first ? '|' : ',';
        out += factors.name(i) + ((c.present & bit(i)) ? "=1" : "=0");
        first = false;
    }
    out += ')';
    return out;
}

namespace {

ojson interval_json(const Interval& iv) { return ojson::array({iv.lower, iv.upper}); }

Interval interval_from(const ojson& j) {
    if (!j.is_array() || j.size() != 2) throw InputError("interval must be a two-element array");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::string to_json(const InteractionReport& r) {
    ojson doc;
    doc["factors"] = r.factors;
    ojson orientation = ojson::array();
    for (const auto& f : r.orientation) {
        orientation.push_back(
            {{"factor", f.factor}, {"ratio", f.ratio}, {"protective", f.protective}, {"mode", std::string(to_string(f.mode))}});
    }
    doc["orientation"] = orientation;
    doc["recodings"] = r.recodings;

    ojson coeffs = ojson::array();
    for (const auto& c : r.coefficients) {
        ojson row = {{"term", c.term}, {"beta", c.beta}, {"ratio", c.ratio}};
        if (c.se) row["se"] = *c.se;
        if (c.ratio_ci) row["ratio_ci"] = interval_json(*c.ratio_ci);
        coeffs.push_back(row);
    }
    doc["coefficients"] = coeffs;

    ojson estimates = ojson::object(), groups = ojson::object(), ses = ojson::object(), cis = ojson::object();
    for (const auto& e : r.estimates) {
        estimates[e.name] = e.value;
        groups[e.name] = e.group;
        if (e.se) ses[e.name] = *e.se;
        if (e.ci) cis[e.name] = interval_json(*e.ci);
    }
    doc["estimates"] = estimates;
    doc["groups"] = groups;
    doc["standard_errors"] = ses;
    doc["cis"] = cis;

    ojson qual = ojson::array();
    for (const auto& q : r.qualitative) {
        qual.push_back({{"factor", q.factor}, {"context", q.context}, {"rr_with", q.rr_with}, {"rr_without", q.rr_without}});
    }
    doc["qualitative"] = qual;
    doc["qualitative_comparisons"] = r.qualitative_comparisons;

    if (r.scale_relation) {
        const auto& s = *r.scale_relation;
        doc["scale_relation"] = {{"applicable", s.applicable},
                                 {"tot_i", s.tot_i},
                                 {"tot_reri", s.tot_reri},
                                 {"super_multiplicative", s.super_multiplicative},
                                 {"super_additive", s.super_additive},
                                 {"violations", s.violations}};
    }
    doc["flags"] = r.flags;
    if (r.fit) {
        doc["fit"] = {{"observations", r.fit->observations},
                      {"iterations", r.fit->iterations},
                      {"converged", r.fit->converged},
                      {"log_likelihood", r.fit->log_likelihood}};
    }
    doc["provenance"] = {
        {"source", r.provenance.source}, {"input_digest", r.provenance.input_digest}, {"tool_version", r.provenance.tool_version}};
    return doc.dump(2) + "\n";
}

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string ci_text(const std::optional<Interval>& iv) {
    if (!iv) return "-";
    return fmt("%.2f", iv->lower) + " , " + fmt("%.2f", iv->upper);
}

std::string se_text(const std::optional<double>& se) { return se ? fmt("%.2f", *se) : "-"; }

// Additive rows in the conventional order: conditional on absence, conditional
// on presence, the top-order RERI, then TotRERI.
const std::vector<std::string>& additive_order() {
    static const std::vector<std::string> order = {"additive.absent", "additive.present", "additive.top", "additive.total"};
    return order;
}

const std::vector<std::string>& multiplicative_order() {
    static const std::vector<std::string> order = {"multiplicative.total", "multiplicative.top", "multiplicative.absent",
                                                   "multiplicative.present"};
    return order;
}

std::string to_table(const InteractionReport& r) {
    std::string out;
    std::size_t width = 12;
    for (const auto& e : r.estimates) width = std::max(width, e.name.size() + 2);
    for (const auto& c : r.coefficients) width = std::max(width, c.term.size() + 2);

    out += "Factors: ";
    for (std::size_t i = 0; i < r.factors.size(); ++i) out += (i ? ", " : "") + r.factors[i];
    out += "\n";
    if (!r.orientation.empty()) {
        out += "Orientation (" + std::string(to_string(r.orientation.front().mode)) + " mode):";
        for (const auto& f : r.orientation) {
            out += " " + f.factor + "=" + fmt("%.2f", f.ratio) + (f.protective ? " [protective]" : "");
        }
        out += "\n";
    }
    if (!r.recodings.empty()) {
        out += "Recoded:";
        for (const auto& s : r.recodings) out += " " + s;
        out += "\n";
    }

    if (!r.coefficients.empty()) {
        out += "\nRisk factors and product terms\n";
        out += pad("term", width) + pad("b", 9) + pad("se(b)", 9) + pad("ratio", 9) + "95% CI for ratio\n";
        for (const auto& c : r.coefficients) {
            out += pad(c.term, width) + pad(fmt("%.2f", c.beta), 9) + pad(se_text(c.se), 9) + pad(fmt("%.2f", c.ratio), 9) +
                   ci_text(c.ratio_ci) + "\n";
        }
    }

    auto section = [&](const std::string& title, const std::string& header, const std::vector<std::string>& order) {
        std::string body;
        for (const auto& group : order) {
            for (const auto& e : r.estimates) {
                if (e.group != group) continue;
                body += pad(e.name, width) + pad(fmt("%.2f", e.value), 9) + pad(se_text(e.se), 9) + ci_text(e.ci) + "\n";
            }
        }
        if (body.empty()) return;
        out += "\n" + title + "\n" + pad("index", width) + pad(header, 9) + pad("se", 9) + "95% CI\n" + body;
    };
    section("Relative excess risk due to interaction (RERI)", "RERI", additive_order());
    section("Multiplicative interaction", "I", multiplicative_order());

    if (r.scale_relation) {
        const auto& s = *r.scale_relation;
        out += "\nScale relation: ";
        if (!s.applicable) {
            out += "theorem inapplicable (some singleton ratio <= 1)\n";
        } else {
            out += std::string(s.super_multiplicative ? "super-multiplicative" : "sub-multiplicative") + ", " +
                   (s.super_additive ? "super-additive" : "not super-additive") +
                   (s.violations.empty() ? ", consistent\n" : ", INCONSISTENT\n");
        }
    }

    out += "\nQualitative interaction: ";
    if (r.qualitative.empty()) {
        out += "none (" + std::to_string(r.qualitative_comparisons) + " comparisons)\n";
    } else {
        out += std::to_string(r.qualitative.size()) + " of " + std::to_string(r.qualitative_comparisons) + " comparisons\n";
        for (const auto& q : r.qualitative) {
            out += "  " + q.factor + " given " + q.context + ": " + fmt("%.3f", q.rr_with) + " vs " + fmt("%.3f", q.rr_without) +
                   "\n";
        }
    }
    if (r.fit) {
        out += "\nFit: " + std::to_string(r.fit->observations) + " observations, " + std::to_string(r.fit->iterations) +
               " iterations, " + (r.fit->converged ? "converged" : "NOT converged") + ", log-likelihood " +
               fmt("%.4f", r.fit->log_likelihood) + "\n";
    }
    if (!r.flags.empty()) {
        out += "\nFlags\n";
        for (const auto& f : r.flags) out += "  " + f + "\n";
    }
    return out;
}

template <class T>
std::vector<T> get_vector(const ojson& doc, const char* key) {
    if (!doc.contains(key)) return {};
    return doc.at(key).get<std::vector<T>>();
}

InteractionReport from_json(const ojson& doc) {
    InteractionReport r;
    r.factors = get_vector<std::string>(doc, "factors");
    for (const auto& f : doc.at("orientation")) {
        r.orientation.push_back({f.at("factor").get<std::string>(), f.at("ratio").get<double>(), f.at("protective").get<bool>(),
                                 mode_from_string(f.at("mode").get<std::string>())});
    }
    r.recodings = get_vector<std::string>(doc, "recodings");
    for (const auto& c : doc.at("coefficients")) {
        CoefficientRow row;
        row.term = c.at("term").get<std::string>();
        row.beta = c.at("beta").get<double>();
        row.ratio = c.at("ratio").get<double>();
        if (c.contains("se")) row.se = c.at("se").get<double>();
        if (c.contains("ratio_ci")) row.ratio_ci = interval_from(c.at("ratio_ci"));
        r.coefficients.push_back(row);
    }
    const auto& groups = doc.at("groups");
    const auto& ses = doc.at("standard_errors");
    const auto& cis = doc.at("cis");
    for (const auto& [name, value] : doc.at("estimates").items()) {
        Estimate e;
        e.name = name;
        e.value = value.get<double>();
        e.group = groups.at(name).get<std::string>();
        if (ses.contains(name)) e.se = ses.at(name).get<double>();
        if (cis.contains(name)) e.ci = interval_from(cis.at(name));
        r.estimates.push_back(e);
    }
    for (const auto& q : doc.at("qualitative")) {
        r.qualitative.push_back({q.at("factor").get<std::string>(), q.at("context").get<std::string>(),
                                 q.at("rr_with").get<double>(), q.at("rr_without").get<double>()});
    }
    r.qualitative_comparisons = doc.at("qualitative_comparisons").get<std::size_t>();
    if (doc.contains("scale_relation")) {
        const auto& s = doc.at("scale_relation");
        ScaleRelation sr;
        sr.applicable = s.at("applicable").get<bool>();
        sr.tot_i = s.at("tot_i").get<double>();
        sr.tot_reri = s.at("tot_reri").get<double>();
        sr.super_multiplicative = s.at("super_multiplicative").get<bool>();
        sr.super_additive = s.at("super_additive").get<bool>();
        sr.violations = s.at("violations").get<std::vector<std::string>>();
        r.scale_relation = sr;
    }
    r.flags = get_vector<std::string>(doc, "flags");
    if (doc.contains("fit")) {
        const auto& f = doc.at("fit");
        r.fit = FitSummary{f.at("observations").get<std::size_t>(), f.at("iterations").get<int>(), f.at("converged").get<bool>(),
                           f.at("log_likelihood").get<double>()};
    }
    const auto& p = doc.at("provenance");
    r.provenance = {p.at("source").get<std::string>(), p.at("input_digest").get<std::string>(),
                    p.at("tool_version").get<std::string>()};
    return r;
}

}  // namespace

std::string emit_report(const InteractionReport& report, ReportFormat format) {
    return format == ReportFormat::json ? to_json(report) : to_table(report);
}

InteractionReport parse_report_json(std::string_view text) {
    try {
        return from_json(ojson::parse(text.begin(), text.end()));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed report: ") + e.what());
    }
}

}  // namespace reri
