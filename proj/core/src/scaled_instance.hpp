#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "branchlab/error.hpp"
#include "branchlab/instance.hpp"
#include "branchlab/lattice.hpp"

namespace branchlab::detail {

/// Gains and gap of an instance on their common integer lattice.
struct ScaledInstance {
    std::vector<std::int64_t> left;
    std::vector<std::int64_t> right;
    std::int64_t gap = 0;
    std::int64_t scale = 1;
};

/// Throws DomainError when the data has no rational form.
inline ScaledInstance scale_to_integers(const BranchingInstance& inst, double gap) {
    std::vector<double> values;
    values.reserve(2 * inst.size() + 1);
    for (const auto& v : inst.variables()) {
        values.push_back(v.left());
        values.push_back(v.right());
    }
    values.push_back(gap);
    const auto lat = to_integer_lattice(values);
    if (!lat) {
        throw Error(ErrorKind::DomainError, "gains and gap must be rationals with denominators <= " +
                                                std::to_string(kMaxLatticeDenominator));
    }
    ScaledInstance out;
    out.scale = lat->scale;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        out.left.push_back(lat->values[2 * i]);
        out.right.push_back(lat->values[2 * i + 1]);
    }
    out.gap = lat->values.back();
    return out;
}

inline void check_states(std::size_t states, std::size_t cap) {
    if (states > cap) {
        throw Error(ErrorKind::BudgetExceeded,
                    "needs " + std::to_string(states) + " states, cap is " + std::to_string(cap));
    }
}

}  // namespace branchlab::detail
