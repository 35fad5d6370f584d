#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace branchlab {

/// Largest denominator accepted when recognising a real input as a rational.
inline constexpr std::int64_t kMaxLatticeDenominator = 1'000'000;

/**
 * Real inputs rescaled onto the integers: values[i] == scale * input[i].
 * Tree sizes are invariant under a common positive scaling of gains and gap,
 * so every integer algorithm applies unchanged to the scaled data.
 */
struct IntegerLattice {
    std::int64_t scale = 1;
    std::vector<std::int64_t> values;
};

/**
 * Recognises each input as p/q (continued fractions, q <= max_denominator,
 * relative error <= 1e-12) and rescales by the lcm of the denominators.
 * Returns nullopt when some value is not such a rational, or when the common
 * scale or a scaled value gets out of range.
 */
std::optional<IntegerLattice> to_integer_lattice(std::span<const double> values,
                                                 std::int64_t max_denominator = kMaxLatticeDenominator);

/// ceil(a / b) for b > 0.
constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) noexcept {
    return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

}  // namespace branchlab
