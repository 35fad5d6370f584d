#include "branchlab/gains.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "branchlab/error.hpp"

namespace branchlab {

VariableGains make_variable(double l, double r) {
    if (std::isnan(l) || std::isnan(r)) {
        throw Error(ErrorKind::NonFiniteGain, "gain is NaN");
    }
    if (l <= 0.0 || r <= 0.0) {
        throw Error(ErrorKind::NonPositiveGain,
                    "gains must be positive, got (" + std::to_string(l) + ", " + std::to_string(r) + ")");
    }
    if (!std::isfinite(l) || !std::isfinite(r)) {
        throw Error(ErrorKind::NonFiniteGain, "gains must be finite");
    }
    if (l > r) std::swap(l, r);
    return VariableGains(l, r);
}

double char_poly_eval(const VariableGains& v, double x) {
    if (!(x > 0.0)) {
        throw Error(ErrorKind::DomainError, "characteristic polynomial is evaluated for x > 0 only");
    }
    const double lx = std::log(x);
    return std::exp((v.right() - v.left()) * lx) * std::expm1(v.left() * lx) - 1.0;
}

}  // namespace branchlab
