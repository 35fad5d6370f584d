#include "branchlab/lattice.hpp"

#include <cmath>
#include <numeric>

namespace branchlab {

namespace {

constexpr double kRationalTolerance = 1e-12;
constexpr double kMaxScaled = 4.0e18;

struct Fraction {
    std::int64_t num;
    std::int64_t den;
};

// Best rational approximation via the continued-fraction convergents.
std::optional<Fraction> as_fraction(double x, std::int64_t max_den) {
    if (!std::isfinite(x) || x < 0.0 || x > kMaxScaled) return std::nullopt;
    const double tol = kRationalTolerance * std::max(1.0, x);
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;  // h(-2), h(-1), k(-2), k(-1)
    double rest = x;
    for (int i = 0; i < 64; ++i) {
        const double a_d = std::floor(rest);
        if (a_d > kMaxScaled) return std::nullopt;
        const auto a = static_cast<std::int64_t>(a_d);
        const std::int64_t h2 = a * h1 + h0;
        const std::int64_t k2 = a * k1 + k0;
        if (k2 > max_den) return std::nullopt;
        if (std::fabs(static_cast<double>(h2) / static_cast<double>(k2) - x) <= tol) {
            return Fraction{h2, k2};
        }
        const double frac = rest - a_d;
        if (frac <= 0.0) return std::nullopt;
        rest = 1.0 / frac;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
    }
    return std::nullopt;
}

}  // namespace

std::optional<IntegerLattice> to_integer_lattice(std::span<const double> values, std::int64_t max_denominator) {
    std::vector<Fraction> fracs;
    fracs.reserve(values.size());
    std::int64_t scale = 1;
    for (const double v : values) {
        const auto f = as_fraction(v, max_denominator);
        if (!f) return std::nullopt;
        scale = std::lcm(scale, f->den);
        if (scale > max_denominator) return std::nullopt;
        fracs.push_back(*f);
    }
    IntegerLattice out;
    out.scale = scale;
    out.values.reserve(fracs.size());
    for (const auto& f : fracs) {
        const double scaled = static_cast<double>(f.num) * static_cast<double>(scale / f.den);
        if (scaled > kMaxScaled) return std::nullopt;
        out.values.push_back(f.num * (scale / f.den));
    }
    return out;
}

}  // namespace branchlab
