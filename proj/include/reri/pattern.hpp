#pragma once

// Exposure patterns are bitmasks over the factor list: bit i set means factor i
// is present. The same encoding keys coefficient subsets (main effects and
// product terms), so the lattice of patterns and the lattice of terms coincide.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace reri {

inline constexpr int kMinFactors = 2;
inline constexpr int kMaxFactors = 20;

using Mask = std::uint32_t;

constexpr Mask bit(int i) { return Mask{1} << i; }
constexpr Mask full_mask(int n) { return (Mask{1} << n) - 1; }
constexpr int popcount(Mask m) { return std::popcount(m); }
constexpr bool is_subset(Mask sub, Mask super) { return (sub & ~super) == 0; }
constexpr std::size_t lattice_size(int n) { return std::size_t{1} << n; }

struct ExposurePattern {
    Mask bits{0};

    constexpr bool has(int i) const { return (bits >> i) & 1u; }
    constexpr int size() const { return std::popcount(bits); }
    constexpr bool contains(ExposurePattern other) const { return is_subset(other.bits, bits); }
    constexpr ExposurePattern toggled(int i) const { return {bits ^ bit(i)}; }

    friend constexpr auto operator<=>(ExposurePattern, ExposurePattern) = default;
};

// Throws InputError unless kMinFactors <= n <= kMaxFactors.
void require_factor_count(int n);

// All 2^n patterns in ascending integer order.
std::vector<ExposurePattern> enumerate_patterns(int n);

// Nonempty subsets ordered by size, then lexicographically by factor index:
// x1, x2, x3, x1*x2, x1*x3, x2*x3, x1*x2*x3 for n = 3. This is the order of
// regression terms and of covariance rows throughout.
std::vector<Mask> canonical_terms(int n);

// Iterates the submasks of `set` (including `set` and 0) in decreasing order.
template <class Fn>
void for_each_submask(Mask set, Fn&& fn) {
    Mask s = set;
    while (true) {
        fn(s);
        if (s == 0) break;
        s = (s - 1) & set;
    }
}

}  // namespace reri
