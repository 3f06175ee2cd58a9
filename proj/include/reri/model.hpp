#pragma once

#include "reri/pattern.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reri {

enum class Orientation { risk, protective, unknown };

std::string_view to_string(Orientation o);
Orientation orientation_from_string(std::string_view s);

// Ordered factor labels. The position of a label is its bit in every mask.
class FactorSet {
public:
    FactorSet() = default;
    explicit FactorSet(std::vector<std::string> names, std::vector<Orientation> orientation = {});

    int size() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(int i) const { return names_.at(static_cast<std::size_t>(i)); }
    Orientation orientation(int i) const { return orientation_.at(static_cast<std::size_t>(i)); }
    const std::vector<Orientation>& orientations() const { return orientation_; }
    std::optional<int> index_of(std::string_view name) const;

    FactorSet with_orientation(int i, Orientation o) const;
    FactorSet with_name(int i, std::string name) const;

    // "x1*x3" for the subset {x1, x3}; "(none)" for the empty set.
    std::string term_label(Mask m) const;
    // Resolves "x3*x1" (any order, surrounding blanks ignored) to its mask.
    Mask parse_term(std::string_view label) const;

    bool operator==(const FactorSet&) const = default;

private:
    std::vector<std::string> names_;
    std::vector<Orientation> orientation_;
};

// Log relative-risk coefficients of the model
//   log RR(pattern) = sum over nonempty terms T contained in pattern of beta_T,
// stored densely by mask (entry 0 is the reference and always 0).
class CoefficientTable {
public:
    CoefficientTable() = default;
    CoefficientTable(FactorSet factors, std::vector<double> by_mask, bool saturated = true);

    static CoefficientTable zeros(FactorSet factors);

    const FactorSet& factors() const { return factors_; }
    int factor_count() const { return factors_.size(); }
    bool saturated() const { return saturated_; }

    double operator[](Mask term) const { return beta_[term]; }
    std::span<const double> by_mask() const { return beta_; }

    // Coefficients in canonical term order.
    std::vector<double> canonical() const;

private:
    FactorSet factors_;
    std::vector<double> beta_;
    bool saturated_ = true;
};

// Covariance over a list of coefficient terms (masks). A fitted model yields the
// full canonical list; a main-effects fit only the singletons.
class CovarianceBlock {
public:
    CovarianceBlock() = default;
    CovarianceBlock(std::vector<Mask> terms, Eigen::MatrixXd matrix);

    const std::vector<Mask>& terms() const { return terms_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    std::size_t dimension() const { return terms_.size(); }
    std::optional<std::size_t> position(Mask term) const;
    double variance(Mask term) const;

private:
    std::vector<Mask> terms_;
    Eigen::MatrixXd matrix_;
};

struct Confounder {
    std::string name;
    bool categorical = false;
    std::vector<double> numeric;       // when !categorical
    std::vector<std::string> levels;   // when categorical, one label per row

    bool operator==(const Confounder&) const = default;
};

// Binary outcome, binary exposures (one column per factor) and optional
// confounders, stored column-wise.
struct DataTable {
    std::string outcome_name;
    FactorSet factors;
    std::vector<std::uint8_t> outcome;
    std::vector<std::vector<std::uint8_t>> exposures;
    std::vector<Confounder> confounders;

    std::size_t rows() const { return outcome.size(); }
    Mask pattern(std::size_t row) const;

    bool operator==(const DataTable&) const = default;
};

}  // namespace reri
