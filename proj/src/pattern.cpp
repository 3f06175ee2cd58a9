#include "reri/pattern.hpp"

#include "reri/error.hpp"

#include <string>

namespace reri {

void require_factor_count(int n) {
    if (n < kMinFactors || n > kMaxFactors) {
        throw InputError("factor count " + std::to_string(n) + " outside [" + std::to_string(kMinFactors) + ", " +
                         std::to_string(kMaxFactors) + "]");
    }
}

std::vector<ExposurePattern> enumerate_patterns(int n) {
    require_factor_count(n);
    std::vector<ExposurePattern> out;
    out.reserve(lattice_size(n));
    for (Mask m = 0; m <= full_mask(n); ++m) out.push_back({m});
    return out;
}

namespace {

void combinations(int n, int k, int start, Mask acc, std::vector<Mask>& out) {
    if (k == 0) {
        out.push_back(acc);
        return;
    }
    for (int i = start; i <= n - k; ++i) combinations(n, k - 1, i + 1, acc | bit(i), out);
}

}  // namespace

std::vector<Mask> canonical_terms(int n) {
    std::vector<Mask> out;
    out.reserve(lattice_size(n) - 1);
    for (int k = 1; k <= n; ++k) combinations(n, k, 0, 0, out);
    return out;
}

}  // namespace reri
