#include "reri/model.hpp"

#include "reri/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace reri {

std::string_view to_string(Orientation o) {
    switch (o) {
    case Orientation::risk: return "risk";
    case Orientation::protective: return "protective";
    case Orientation::unknown: return "unknown";
    }
    return "unknown";
}

Orientation orientation_from_string(std::string_view s) {
    if (s == "risk") return Orientation::risk;
    if (s == "protective") return Orientation::protective;
    if (s == "unknown") return Orientation::unknown;
    throw InputError("unknown orientation '" + std::string(s) + "' (expected risk, protective or unknown)");
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

FactorSet::FactorSet(std::vector<std::string> names, std::vector<Orientation> orientation)
    : names_(std::move(names)), orientation_(std::move(orientation)) {
    require_factor_count(static_cast<int>(names_.size()));
    if (orientation_.empty()) orientation_.assign(names_.size(), Orientation::unknown);
    if (orientation_.size() != names_.size()) throw InputError("orientation list does not match factor count");
    std::set<std::string> seen;
    for (const auto& name : names_) {
        if (name.empty() || trim(name).size() != name.size()) throw InputError("factor label '" + name + "' is empty or padded");
        if (name.find_first_of("*,|=") != std::string::npos) {
            throw InputError("factor label '" + name + "' contains a reserved character (* , | =)");
        }
        if (!seen.insert(name).second) throw InputError("duplicate factor label '" + name + "'");
    }
}

std::optional<int> FactorSet::index_of(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<int>(it - names_.begin());
}

FactorSet FactorSet::with_orientation(int i, Orientation o) const {
    FactorSet copy = *this;
    copy.orientation_.at(static_cast<std::size_t>(i)) = o;
    return copy;
}

FactorSet FactorSet::with_name(int i, std::string name) const {
    auto names = names_;
    names.at(static_cast<std::size_t>(i)) = std::move(name);
    return FactorSet(std::move(names), orientation_);
}

std::string FactorSet::term_label(Mask m) const {
    if (m == 0) return "(none)";
    std::string out;
    for (int i = 0; i < size(); ++i) {
        if (!(m & bit(i))) continue;
        if (!out.empty()) out += '*';
        out += names_[static_cast<std::size_t>(i)];
    }
    return out;
}

Mask FactorSet::parse_term(std::string_view label) const {
    Mask m = 0;
    std::string_view rest = label;
    while (true) {
        auto star = rest.find('*');
        auto part = trim(rest.substr(0, star));
        auto idx = index_of(part);
        if (!idx) throw InputError("unknown factor label '" + std::string(part) + "' in term '" + std::string(label) + "'");
        if (m & bit(*idx)) throw InputError("factor '" + std::string(part) + "' repeated in term '" + std::string(label) + "'");
        m |= bit(*idx);
        if (star == std::string_view::npos) break;
        rest.remove_prefix(star + 1);
    }
    return m;
}

CoefficientTable::CoefficientTable(FactorSet factors, std::vector<double> by_mask, bool saturated)
    : factors_(std::move(factors)), beta_(std::move(by_mask)), saturated_(saturated) {
    if (beta_.size() != lattice_size(factors_.size())) throw InputError("coefficient vector length does not match 2^n");
    if (beta_[0] != 0.0) throw InputError("reference coefficient (empty term) must be 0");
    for (Mask m = 1; m < beta_.size(); ++m) {
        if (!std::isfinite(beta_[m])) throw InputError("non-finite coefficient for term " + factors_.term_label(m));
    }
}

CoefficientTable CoefficientTable::zeros(FactorSet factors) {
    auto n = factors.size();
    return CoefficientTable(std::move(factors), std::vector<double>(lattice_size(n), 0.0), true);
}

std::vector<double> CoefficientTable::canonical() const {
    std::vector<double> out;
    for (Mask t : canonical_terms(factor_count())) out.push_back(beta_[t]);
    return out;
}

CovarianceBlock::CovarianceBlock(std::vector<Mask> terms, Eigen::MatrixXd matrix)
    : terms_(std::move(terms)), matrix_(std::move(matrix)) {
    const auto d = static_cast<Eigen::Index>(terms_.size());
    if (matrix_.rows() != d || matrix_.cols() != d) {
        throw InputError("covariance dimension " + std::to_string(matrix_.rows()) + "x" + std::to_string(matrix_.cols()) +
                         " does not match " + std::to_string(d) + " terms");
    }
    if (!matrix_.allFinite()) throw InputError("covariance contains non-finite entries");
    const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < d; ++i) {
        if (matrix_(i, i) < 0.0) throw InputError("covariance has a negative diagonal entry");
        for (Eigen::Index j = i + 1; j < d; ++j) {
            if (std::abs(matrix_(i, j) - matrix_(j, i)) > 1e-10 * scale) throw InputError("covariance is not symmetric");
        }
    }
    std::set<Mask> seen(terms_.begin(), terms_.end());
    if (seen.size() != terms_.size() || seen.count(0)) throw InputError("covariance terms must be distinct and nonempty");
}

std::optional<std::size_t> CovarianceBlock::position(Mask term) const {
    auto it = std::find(terms_.begin(), terms_.end(), term);
    if (it == terms_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - terms_.begin());
}

double CovarianceBlock::variance(Mask term) const {
    auto pos = position(term);
    if (!pos) throw InputError("term not covered by covariance");
    auto p = static_cast<Eigen::Index>(*pos);
    return matrix_(p, p);
}

Mask DataTable::pattern(std::size_t row) const {
    Mask m = 0;
    for (std::size_t j = 0; j < exposures.size(); ++j) {
        if (exposures[j][row]) m |= bit(static_cast<int>(j));
    }
    return m;
}

}  // namespace reri
