#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "branchlab/gains.hpp"

namespace branchlab {

/**
 * Input shared by the single-, multiple- and general-variable problems:
 * candidate variables, the gap to close and, for the general problem, how many
 * times each variable may be branched on along one root-to-leaf path.
 */
class BranchingInstance {
public:
    /// Throws InvalidInstance on an empty variable list, gap <= 0, or a bad
    /// multiplicity vector (wrong length or an entry < 1).
    BranchingInstance(std::vector<VariableGains> variables, double gap,
                      std::optional<std::vector<std::uint32_t>> multiplicities = std::nullopt);

    const std::vector<VariableGains>& variables() const noexcept { return variables_; }
    double gap() const noexcept { return gap_; }
    const std::optional<std::vector<std::uint32_t>>& multiplicities() const noexcept {
        return multiplicities_;
    }
    std::size_t size() const noexcept { return variables_.size(); }

    friend bool operator==(const BranchingInstance&, const BranchingInstance&) = default;

private:
    std::vector<VariableGains> variables_;
    double gap_;
    std::optional<std::vector<std::uint32_t>> multiplicities_;
};

/// Multiplies every gain and the gap by q > 0. Tree sizes are unchanged and a
/// variable's ratio becomes phi^(1/q).
BranchingInstance scale_instance(const BranchingInstance& inst, double q);

/// {"variables": [[l, r], ...], "gap": G, "multiplicities": [...]}.
/// Integral values are written without a fractional part.
std::string to_json(const BranchingInstance& inst);

/// Throws ParseError for malformed JSON or a wrong shape, and the usual
/// validation errors for bad values.
BranchingInstance instance_from_json(std::string_view text);

}  // namespace branchlab
