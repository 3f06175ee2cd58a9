#pragma once

#include "reri/lattice.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace reri::test {

inline FactorSet factors(int n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
    return FactorSet(names);
}

// Saturated table with product terms drawn from [-scale, scale].
inline CoefficientTable random_coefficients(std::mt19937_64& rng, int n, double scale = 0.7) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<double> beta(lattice_size(n), 0.0);
    for (Mask m = 1; m < beta.size(); ++m) beta[m] = u(rng);
    return CoefficientTable(factors(n), std::move(beta), true);
}

// Surface with arbitrary positive relative risks in [lo, hi].
inline RiskSurface random_surface(std::mt19937_64& rng, int n, double lo = 0.2, double hi = 5.0) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    std::vector<double> rr(lattice_size(n), 1.0);
    for (Mask m = 1; m < rr.size(); ++m) rr[m] = std::exp(u(rng));
    return RiskSurface(factors(n), std::move(rr));
}

// Random symmetric positive definite matrix.
inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index dim, double scale = 0.05) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd a(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) a(r, c) = g(rng);
    }
    Eigen::MatrixXd s = scale * (a * a.transpose() / static_cast<double>(dim)) + 1e-3 * Eigen::MatrixXd::Identity(dim, dim);
    return 0.5 * (s + s.transpose());
}

inline CoefficientTable worked_example_coefficients() {
    // canonical order: lowMD, highBMI, smoking, then the products
    std::vector<double> beta(8, 0.0);
    beta[0b001] = 0.36;
    beta[0b010] = 0.29;
    beta[0b100] = 0.41;
    beta[0b011] = -0.27;
    beta[0b101] = -0.23;
    beta[0b110] = -0.24;
    beta[0b111] = 0.92;
    return CoefficientTable(FactorSet({"lowMD", "highBMI", "smoking"}), std::move(beta), true);
}

}  // namespace reri::test
