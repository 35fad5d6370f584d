#include "branchlab/instance.hpp"

#include <cmath>
#include <string>

#include <json.hpp>

#include "branchlab/error.hpp"

namespace branchlab {

BranchingInstance::BranchingInstance(std::vector<VariableGains> variables, double gap,
                                     std::optional<std::vector<std::uint32_t>> multiplicities)
    : variables_(std::move(variables)), gap_(gap), multiplicities_(std::move(multiplicities)) {
    if (variables_.empty()) {
        throw Error(ErrorKind::InvalidInstance, "instance needs at least one variable");
    }
    if (!(gap_ > 0.0) || !std::isfinite(gap_)) {
        throw Error(ErrorKind::InvalidInstance, "gap must be positive and finite");
    }
    if (multiplicities_) {
        if (multiplicities_->size() != variables_.size()) {
            throw Error(ErrorKind::InvalidInstance, "multiplicities must match the variables one to one");
        }
        for (const auto m : *multiplicities_) {
            if (m < 1) throw Error(ErrorKind::InvalidInstance, "multiplicities must be >= 1");
        }
    }
}

BranchingInstance scale_instance(const BranchingInstance& inst, double q) {
    if (!(q > 0.0) || !std::isfinite(q)) {
        throw Error(ErrorKind::NonPositiveGain, "scaling factor must be positive and finite");
    }
    if (q == 1.0) return inst;
    std::vector<VariableGains> scaled;
    scaled.reserve(inst.size());
    for (const auto& v : inst.variables()) {
        scaled.push_back(make_variable(v.left() * q, v.right() * q));
    }
    return BranchingInstance(std::move(scaled), inst.gap() * q, inst.multiplicities());
}

namespace {

nlohmann::ordered_json number(double v) {
    if (std::floor(v) == v && std::fabs(v) < 9007199254740992.0) {
        return static_cast<std::int64_t>(v);
    }
    return v;
}

double as_number(const nlohmann::ordered_json& j, const char* what) {
    if (!j.is_number()) {
        throw Error(ErrorKind::ParseError, std::string(what) + " must be a number");
    }
    return j.get<double>();
}

}  // namespace

std::string to_json(const BranchingInstance& inst) {
    nlohmann::ordered_json vars = nlohmann::ordered_json::array();
    for (const auto& v : inst.variables()) {
        vars.push_back({number(v.left()), number(v.right())});
    }
    nlohmann::ordered_json j;
    j["variables"] = std::move(vars);
    j["gap"] = number(inst.gap());
    if (inst.multiplicities()) j["multiplicities"] = *inst.multiplicities();
    return j.dump();
}

BranchingInstance instance_from_json(std::string_view text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::ordered_json::parse_error& e) {
        throw Error(ErrorKind::ParseError, std::string("invalid instance JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("variables") || !j.contains("gap")) {
        throw Error(ErrorKind::ParseError, "instance JSON needs \"variables\" and \"gap\"");
    }
    const auto& jv = j.at("variables");
    if (!jv.is_array()) throw Error(ErrorKind::ParseError, "\"variables\" must be an array");

    std::vector<VariableGains> vars;
    for (const auto& pair : jv) {
        if (!pair.is_array() || pair.size() != 2) {
            throw Error(ErrorKind::ParseError, "each variable must be a [l, r] pair");
        }
        vars.push_back(make_variable(as_number(pair[0], "gain"), as_number(pair[1], "gain")));
    }

    std::optional<std::vector<std::uint32_t>> mults;
    if (j.contains("multiplicities") && !j.at("multiplicities").is_null()) {
        const auto& jm = j.at("multiplicities");
        if (!jm.is_array()) throw Error(ErrorKind::ParseError, "\"multiplicities\" must be an array");
        mults.emplace();
        for (const auto& m : jm) {
            if (!m.is_number_integer() || m.get<std::int64_t>() < 1) {
                throw Error(ErrorKind::InvalidInstance, "multiplicities must be integers >= 1");
            }
            mults->push_back(m.get<std::uint32_t>());
        }
    }
    return BranchingInstance(std::move(vars), as_number(j.at("gap"), "gap"), std::move(mults));
}

}  // namespace branchlab
