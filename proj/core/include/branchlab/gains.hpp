#pragma once

namespace branchlab {

/**
 * Left/right dual-bound gains of a branching variable.
 *
 * Invariant: 0 < left() <= right(), both finite. Instances are only built
 * through make_variable(), which swaps reversed inputs.
 */
class VariableGains {
public:
    double left() const noexcept { return l_; }
    double right() const noexcept { return r_; }

    friend bool operator==(const VariableGains&, const VariableGains&) = default;

private:
    friend VariableGains make_variable(double l, double r);
    VariableGains(double l, double r) : l_(l), r_(r) {}

    double l_;
    double r_;
};

/// Throws NonPositiveGain / NonFiniteGain.
VariableGains make_variable(double l, double r);

/**
 * Characteristic polynomial x^r - x^(r-l) - 1 of the single-variable
 * recurrence, for real exponents and x > 0.
 *
 * Evaluated as x^(r-l) * expm1(l ln x) - 1, which keeps full relative
 * accuracy for x close to 1 where the ratio of large-gain variables lives.
 * p(1) = -1 exactly; p is strictly increasing on [1, inf).
 */
double char_poly_eval(const VariableGains& v, double x);

}  // namespace branchlab
