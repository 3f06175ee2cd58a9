#include "reri/fit.hpp"

#include "reri/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace reri {

namespace {

struct Design {
    Eigen::MatrixXd x;
    std::vector<std::string> columns;
    std::vector<Mask> exposure_terms;   // columns 1..k
};

Design build_design(const DataTable& data, bool saturated) {
    const int n = data.factors.size();
    Design d;
    d.columns.push_back("(intercept)");
    if (saturated) {
        d.exposure_terms = canonical_terms(n);
    } else {
        for (int i = 0; i < n; ++i) d.exposure_terms.push_back(bit(i));
    }
    for (Mask t : d.exposure_terms) d.columns.push_back(data.factors.term_label(t));

    struct Dummy {
        std::size_t confounder;
        std::string level;
    };
    std::vector<std::size_t> numeric;
    std::vector<Dummy> dummies;
    for (std::size_t c = 0; c < data.confounders.size(); ++c) {
        const auto& conf = data.confounders[c];
        if (!conf.categorical) {
            numeric.push_back(c);
            d.columns.push_back(conf.name);
            continue;
        }
        std::set<std::string> levels(conf.levels.begin(), conf.levels.end());
        // first level in sorted order is the reference
        for (auto it = std::next(levels.begin()); it != levels.end(); ++it) {
            dummies.push_back({c, *it});
            d.columns.push_back(conf.name + "=" + *it);
        }
    }

    const auto rows = static_cast<Eigen::Index>(data.rows());
    const auto cols = static_cast<Eigen::Index>(d.columns.size());
    d.x.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto row = static_cast<std::size_t>(r);
        const Mask p = data.pattern(row);
        Eigen::Index col = 0;
        d.x(r, col++) = 1.0;
        for (Mask t : d.exposure_terms) d.x(r, col++) = is_subset(t, p) ? 1.0 : 0.0;
        for (std::size_t c : numeric) d.x(r, col++) = data.confounders[c].numeric[row];
        for (const auto& dm : dummies) d.x(r, col++) = data.confounders[dm.confounder].levels[row] == dm.level ? 1.0 : 0.0;
    }
    return d;
}

// First column whose addition does not raise the rank of the scaled Gram matrix.
std::optional<Eigen::Index> rank_deficient_column(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd gram = x.transpose() * x;
    const Eigen::Index p = gram.rows();
    Eigen::VectorXd scale(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        if (gram(j, j) <= 0.0) return j;
        scale(j) = 1.0 / std::sqrt(gram(j, j));
    }
    Eigen::MatrixXd corr = scale.asDiagonal() * gram * scale.asDiagonal();
    for (Eigen::Index k = 2; k <= p; ++k) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(corr.topLeftCorner(k, k));
        qr.setThreshold(1e-10);
        if (qr.rank() < k) return k - 1;
    }
    return std::nullopt;
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

struct LogLikelihood {
    double value = 0.0;
    double rounding = 0.0;   // bound on the floating-point error of value
};

// Neumaier-compensated sum; near the optimum Newton steps change the total by
// less than a plain sum over many rows can resolve.
LogLikelihood log_likelihood(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
    double sum = 0.0, compensation = 0.0, magnitude = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double term = y(i) * eta(i) - softplus(eta(i));
        const double t = sum + term;
        compensation += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
        magnitude += std::abs(y(i) * eta(i)) + softplus(eta(i));
    }
    return {sum + compensation, 8.0 * std::numeric_limits<double>::epsilon() * magnitude};
}

Eigen::VectorXd probabilities(const Eigen::VectorXd& eta) {
    return eta.unaryExpr([](double e) { return 1.0 / (1.0 + std::exp(-e)); });
}

constexpr double kDivergence = 30.0;

}  // namespace

FitResult fit_logistic(const DataTable& data, const FitOptions& options) {
    const int n = data.factors.size();
    const std::size_t rows = data.rows();
    if (rows == 0) throw InputError("cannot fit an empty data table");
    std::size_t events = 0;
    for (auto y : data.outcome) events += y;
    if (events == 0 || events == rows) throw InputError("outcome needs at least one event and one non-event");

    FitResult result;

    std::vector<std::size_t> cell_n(lattice_size(n), 0), cell_e(lattice_size(n), 0);
    for (std::size_t r = 0; r < rows; ++r) {
        const Mask p = data.pattern(r);
        ++cell_n[p];
        cell_e[p] += data.outcome[r];
    }
    if (options.saturated) {
        for (Mask m : canonical_terms(n)) {
            const std::string label = data.factors.term_label(m);
            if (cell_n[m] == 0) {
                throw NumericalError("rank deficiency: no subjects with exposure pattern " + label + "; column '" + label +
                                     "' is not identifiable");
            }
        }
        for (Mask m = 0; m < cell_n.size(); ++m) {
            const std::string column = m == 0 ? "(intercept)" : data.factors.term_label(m);
            if (cell_e[m] == 0 || cell_e[m] == cell_n[m]) {
                throw NumericalError("separation: exposure pattern " + data.factors.term_label(m) + " has " +
                                     (cell_e[m] == 0 ? "no events" : "only events") + "; column '" + column + "' diverges");
            }
        }
    }
    for (Mask m = 0; m < cell_n.size(); ++m) {
        if (cell_n[m] > 0 && cell_e[m] < static_cast<std::size_t>(options.min_cell_events)) {
            result.warnings.push_back("exposure pattern " + data.factors.term_label(m) + " has only " +
                                      std::to_string(cell_e[m]) + " events");
        }
    }

    Design design = build_design(data, options.saturated);
    result.columns = design.columns;
    if (auto bad = rank_deficient_column(design.x)) {
        throw NumericalError("rank deficiency: column '" + design.columns[static_cast<std::size_t>(*bad)] +
                             "' is collinear with earlier columns");
    }

    const auto& x = design.x;
    const Eigen::Index p = x.cols();
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) y(static_cast<Eigen::Index>(r)) = data.outcome[r];

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    const double ybar = static_cast<double>(events) / static_cast<double>(rows);
    beta(0) = std::log(ybar / (1.0 - ybar));

    Eigen::VectorXd eta = x * beta;
    double ll = log_likelihood(eta, y).value;
    result.log_likelihood_trace.push_back(ll);
    Eigen::MatrixXd info;

    for (int iter = 0;; ++iter) {
        Eigen::VectorXd prob = probabilities(eta);
        Eigen::VectorXd score = x.transpose() * (y - prob);
        result.max_score = score.cwiseAbs().maxCoeff();
        Eigen::VectorXd w = prob.cwiseProduct(Eigen::VectorXd::Ones(prob.size()) - prob);
        info = x.transpose() * w.asDiagonal() * x;
        if (result.max_score < options.tolerance) {
            result.converged = true;
            break;
        }
        if (iter >= options.max_iterations) break;

        Eigen::VectorXd step = info.ldlt().solve(score);
        double t = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
            Eigen::VectorXd candidate = beta + t * step;
            Eigen::VectorXd eta_c = x * candidate;
            const auto ll_c = log_likelihood(eta_c, y);
            // a decrease within rounding is not evidence against the step
            if (std::isfinite(ll_c.value) && ll_c.value >= ll - ll_c.rounding) {
                beta = std::move(candidate);
                eta = std::move(eta_c);
                ll = ll_c.value;
                accepted = true;
                break;
            }
        }
        ++result.iterations;
        result.log_likelihood_trace.push_back(ll);
        for (Eigen::Index j = 0; j < p; ++j) {
            if (std::abs(beta(j)) > kDivergence) {
                throw NumericalError("separation: coefficient of column '" + design.columns[static_cast<std::size_t>(j)] +
                                     "' diverges");
            }
        }
        if (!accepted) {
            // no ascent direction at working precision
            Eigen::VectorXd prob_final = probabilities(eta);
            result.max_score = (x.transpose() * (y - prob_final)).cwiseAbs().maxCoeff();
            Eigen::VectorXd w_final = prob_final.cwiseProduct(Eigen::VectorXd::Ones(prob_final.size()) - prob_final);
            info = x.transpose() * w_final.asDiagonal() * x;
            result.converged = result.max_score < options.tolerance;
            break;
        }
    }
    if (!result.converged) {
        result.warnings.push_back("IRLS did not converge after " + std::to_string(result.iterations) +
                                  " iterations (max |score| " + std::to_string(result.max_score) + ")");
    }

    Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
    cov = 0.5 * (cov + cov.transpose());

    result.log_likelihood = ll;
    result.intercept = beta(0);
    const auto k = static_cast<Eigen::Index>(design.exposure_terms.size());
    std::vector<double> by_mask(lattice_size(n), 0.0);
    for (Eigen::Index j = 0; j < k; ++j) by_mask[design.exposure_terms[static_cast<std::size_t>(j)]] = beta(1 + j);
    result.coefficients = CoefficientTable(data.factors, std::move(by_mask), options.saturated);
    result.covariance = CovarianceBlock(design.exposure_terms, cov.block(1, 1, k, k));
    for (Eigen::Index j = 1 + k; j < p; ++j) {
        result.confounder_coefficients.push_back({design.columns[static_cast<std::size_t>(j)], beta(j)});
    }
    return result;
}

}  // namespace reri
