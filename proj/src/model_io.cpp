#include "reri/model_io.hpp"

#include "reri/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace reri {

using nlohmann::json;

namespace {

json parse_json(std::string_view text, const char* what, std::vector<std::string>* coefficient_keys = nullptr) {
    std::string top_key;
    json::parser_callback_t cb = [&](int depth, json::parse_event_t event, json& parsed) {
        if (event == json::parse_event_t::key) {
            if (depth == 1) top_key = parsed.get<std::string>();
            if (depth == 2 && top_key == "coefficients" && coefficient_keys) {
                coefficient_keys->push_back(parsed.get<std::string>());
            }
        }
        return true;
    };
    try {
        return json::parse(text.begin(), text.end(), cb);
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed ") + what + ": " + e.what());
    }
}

double finite_number(const json& v, const std::string& context) {
    if (!v.is_number()) throw InputError(context + " is not a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) throw InputError(context + " is not finite");
    return x;
}

Eigen::MatrixXd parse_matrix(const json& v) {
    if (!v.is_array()) throw InputError("covariance must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    Eigen::MatrixXd m(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
            throw InputError("covariance dimension mismatch: row " + std::to_string(i) + " is not of length " +
                             std::to_string(rows));
        }
        for (Eigen::Index j = 0; j < rows; ++j) {
            m(i, j) = finite_number(row[static_cast<std::size_t>(j)], "covariance entry");
        }
    }
    return m;
}

std::vector<Mask> parse_term_list(const json& v, const FactorSet& factors) {
    if (!v.is_array()) throw InputError("covariance terms must be an array of labels");
    std::vector<Mask> terms;
    for (const auto& label : v) {
        if (!label.is_string()) throw InputError("covariance term labels must be strings");
        terms.push_back(factors.parse_term(label.get<std::string>()));
    }
    return terms;
}

std::vector<Mask> canonical_subset(int n, const std::set<Mask>& present) {
    std::vector<Mask> out;
    for (Mask t : canonical_terms(n)) {
        if (present.count(t)) out.push_back(t);
    }
    return out;
}

}  // namespace

CoefficientSpec parse_coefficient_spec(std::string_view text, const CoefficientSpecOptions& options) {
    std::vector<std::string> keys;
    json doc = parse_json(text, "coefficient document", &keys);
    if (!doc.is_object()) throw InputError("coefficient document must be a JSON object");

    if (!doc.contains("factors") || !doc["factors"].is_array()) throw InputError("coefficient document lacks a \"factors\" array");
    std::vector<std::string> names;
    for (const auto& f : doc["factors"]) {
        if (!f.is_string()) throw InputError("factor labels must be strings");
        names.push_back(f.get<std::string>());
    }
    FactorSet factors(names);

    if (doc.contains("orientation")) {
        const auto& o = doc["orientation"];
        if (!o.is_object()) throw InputError("\"orientation\" must be an object");
        for (const auto& [name, value] : o.items()) {
            auto idx = factors.index_of(name);
            if (!idx) throw InputError("unknown factor label '" + name + "' in orientation");
            if (!value.is_string()) throw InputError("orientation values must be strings");
            factors = factors.with_orientation(*idx, orientation_from_string(value.get<std::string>()));
        }
    }

    if (!doc.contains("coefficients") || !doc["coefficients"].is_object()) {
        throw InputError("coefficient document lacks a \"coefficients\" object");
    }
    const int n = factors.size();
    std::vector<double> beta(lattice_size(n), 0.0);
    std::map<Mask, std::string> seen;
    for (const auto& key : keys) {
        Mask m = factors.parse_term(key);
        auto [it, inserted] = seen.emplace(m, key);
        if (!inserted) throw InputError("duplicate subset key: '" + key + "' and '" + it->second + "' name the same term");
        beta[m] = finite_number(doc["coefficients"][key], "coefficient '" + key + "'");
    }

    for (int i = 0; i < n; ++i) {
        if (!seen.count(bit(i))) throw InputError("missing main effect for factor '" + factors.name(i) + "'");
    }
    const bool complete = seen.size() == lattice_size(n) - 1;
    bool declared_partial = false;
    if (doc.contains("saturated")) {
        if (!doc["saturated"].is_boolean()) throw InputError("\"saturated\" must be a boolean");
        declared_partial = !doc["saturated"].get<bool>();
    }
    if (!complete && !(options.allow_missing_terms || declared_partial)) {
        std::string missing;
        for (Mask t : canonical_terms(n)) {
            if (!seen.count(t)) {
                missing = factors.term_label(t);
                break;
            }
        }
        throw InputError("product term '" + missing + "' missing; declare \"saturated\": false or allow missing terms");
    }

    CoefficientSpec spec{CoefficientTable(factors, std::move(beta), complete), std::nullopt};

    if (doc.contains("covariance") && !doc["covariance"].is_null()) {
        Eigen::MatrixXd m = parse_matrix(doc["covariance"]);
        std::vector<Mask> terms;
        if (doc.contains("covariance_terms")) {
            terms = parse_term_list(doc["covariance_terms"], factors);
        } else {
            std::set<Mask> present;
            for (const auto& [mask, label] : seen) present.insert(mask);
            terms = canonical_subset(n, present);
        }
        if (static_cast<std::size_t>(m.rows()) != terms.size()) {
            throw InputError("covariance dimension mismatch: " + std::to_string(m.rows()) + " rows for " +
                             std::to_string(terms.size()) + " coefficients");
        }
        for (Mask t : terms) {
            if (!seen.count(t)) throw InputError("covariance term '" + factors.term_label(t) + "' has no coefficient");
        }
        spec.covariance = CovarianceBlock(std::move(terms), std::move(m));
    }
    return spec;
}

CovarianceBlock parse_covariance(std::string_view text, const FactorSet& factors) {
    json doc = parse_json(text, "covariance document");
    if (doc.is_array()) {
        Eigen::MatrixXd m = parse_matrix(doc);
        auto terms = canonical_terms(factors.size());
        if (static_cast<std::size_t>(m.rows()) != terms.size()) {
            throw InputError("covariance dimension mismatch: " + std::to_string(m.rows()) + " rows for " +
                             std::to_string(terms.size()) + " coefficients");
        }
        return CovarianceBlock(std::move(terms), std::move(m));
    }
    if (!doc.is_object() || !doc.contains("matrix") || !doc.contains("terms")) {
        throw InputError("covariance document must be a matrix or an object with \"terms\" and \"matrix\"");
    }
    auto terms = parse_term_list(doc["terms"], factors);
    Eigen::MatrixXd m = parse_matrix(doc["matrix"]);
    if (static_cast<std::size_t>(m.rows()) != terms.size()) {
        throw InputError("covariance dimension mismatch: " + std::to_string(m.rows()) + " rows for " +
                         std::to_string(terms.size()) + " terms");
    }
    return CovarianceBlock(std::move(terms), std::move(m));
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> cells;
    while (true) {
        auto comma = line.find(',');
        cells.push_back(trim(line.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    return cells;
}

std::optional<double> to_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) return std::nullopt;
    return x;
}

std::uint8_t to_binary(std::string_view s, std::size_t line, const std::string& column) {
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw InputError("line " + std::to_string(line) + ", column '" + column + "': value '" + std::string(s) +
                     "' is not binary (0/1)");
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

std::string format_double(double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

}  // namespace

DataTable parse_data_table(std::string_view text, const DataTableConfig& config) {
    std::vector<std::pair<std::size_t, std::string_view>> lines;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        ++line_no;
        if (!trim(line).empty()) lines.emplace_back(line_no, line);
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    if (lines.empty()) throw InputError("data table is empty");

    auto header = split_line(lines.front().second);
    std::map<std::string, std::size_t> column;
    for (std::size_t j = 0; j < header.size(); ++j) {
        std::string name(header[j]);
        if (!column.emplace(name, j).second) throw InputError("duplicate column '" + name + "' in header");
    }
    if (!column.count(config.outcome)) throw InputError("outcome column '" + config.outcome + "' missing from header");

    std::vector<std::string> factor_names = config.factors;
    if (factor_names.empty()) {
        for (auto h : header) {
            std::string name(h);
            if (name != config.outcome && !contains(config.confounders, name)) factor_names.push_back(name);
        }
    }
    for (const auto& name : factor_names) {
        if (!column.count(name)) throw InputError("factor column '" + name + "' missing from header");
    }
    for (const auto& name : config.confounders) {
        if (!column.count(name)) throw InputError("confounder column '" + name + "' missing from header");
    }

    DataTable table;
    table.outcome_name = config.outcome;
    table.factors = FactorSet(factor_names);
    table.exposures.assign(factor_names.size(), {});
    std::vector<std::vector<std::string>> raw_confounders(config.confounders.size());

    if (lines.size() == 1) throw InputError("data table has a header but no rows");
    for (std::size_t r = 1; r < lines.size(); ++r) {
        auto [ln, line] = lines[r];
        auto cells = split_line(line);
        if (cells.size() != header.size()) {
            throw InputError("line " + std::to_string(ln) + ": expected " + std::to_string(header.size()) + " fields, found " +
                             std::to_string(cells.size()));
        }
        table.outcome.push_back(to_binary(cells[column[config.outcome]], ln, config.outcome));
        for (std::size_t f = 0; f < factor_names.size(); ++f) {
            table.exposures[f].push_back(to_binary(cells[column[factor_names[f]]], ln, factor_names[f]));
        }
        for (std::size_t c = 0; c < config.confounders.size(); ++c) {
            auto cell = cells[column[config.confounders[c]]];
            if (cell.empty()) {
                throw InputError("line " + std::to_string(ln) + ", column '" + config.confounders[c] + "': missing value");
            }
            raw_confounders[c].emplace_back(cell);
        }
    }

    for (std::size_t c = 0; c < config.confounders.size(); ++c) {
        Confounder conf;
        conf.name = config.confounders[c];
        conf.categorical = contains(config.categorical, conf.name);
        if (!conf.categorical) {
            for (const auto& v : raw_confounders[c]) {
                auto x = to_number(v);
                if (!x) {
                    conf.categorical = true;
                    conf.numeric.clear();
                    break;
                }
                conf.numeric.push_back(*x);
            }
        }
        if (conf.categorical) conf.levels = std::move(raw_confounders[c]);
        table.confounders.push_back(std::move(conf));
    }
    return table;
}

std::string write_data_table(const DataTable& table) {
    std::string out = table.outcome_name;
    for (const auto& name : table.factors.names()) out += "," + name;
    for (const auto& c : table.confounders) out += "," + c.name;
    out += '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        out += table.outcome[r] ? '1' : '0';
        for (const auto& col : table.exposures) {
            out += ',';
            out += col[r] ? '1' : '0';
        }
        for (const auto& c : table.confounders) {
            out += ',';
            out += c.categorical ? c.levels[r] : format_double(c.numeric[r]);
        }
        out += '\n';
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("failed writing '" + path + "'");
}

}  // namespace reri
