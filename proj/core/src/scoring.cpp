#include "branchlab/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <mutex>
#include <numeric>

#include "branchlab/error.hpp"

namespace branchlab {

namespace {

double ratio_of(const SelectionContext& ctx, const VariableGains& v) {
    return ctx.cache ? ctx.cache->phi(v) : svb_ratio(v, ctx.ratio).phi;
}

void require_candidates(const SelectionContext& ctx) {
    if (ctx.candidates.empty()) throw Error(ErrorKind::InvalidInstance, "selection needs a candidate");
}

template <class Score>
std::size_t argmax(std::span<const VariableGains> candidates, Score&& score) {
    std::size_t best = 0;
    double best_score = score(candidates[0]);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double s = score(candidates[i]);
        if (s > best_score) {
            best = i;
            best_score = s;
        }
    }
    return best;
}

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
    T value{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

}  // namespace

double score_linear(const VariableGains& v, double mu) {
    return (1.0 - mu) * v.left() + mu * v.right();
}

double score_product(const VariableGains& v, double eps) {
    return std::max(eps, v.left()) * std::max(eps, v.right());
}

bool dominates(const VariableGains& a, const VariableGains& b) noexcept {
    return a.left() >= b.left() && a.right() >= b.right() && (a.left() > b.left() || a.right() > b.right());
}

std::vector<std::size_t> filter_dominated(std::span<const VariableGains> candidates) {
    // Sweep by decreasing left gain: a candidate survives iff its right gain
    // beats every right gain seen at a strictly larger left, and no equal-left
    // candidate has a larger right.
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& va = candidates[a];
        const auto& vb = candidates[b];
        if (va.left() != vb.left()) return va.left() > vb.left();
        return va.right() > vb.right();
    });
    std::vector<std::size_t> survivors;
    double best_right = -std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    while (i < order.size()) {
        const double left = candidates[order[i]].left();
        const double group_max = candidates[order[i]].right();
        std::size_t j = i;
        for (; j < order.size() && candidates[order[j]].left() == left; ++j) {
            const double right = candidates[order[j]].right();
            if (right == group_max && right > best_right) survivors.push_back(order[j]);
        }
        best_right = std::max(best_right, group_max);
        i = j;
    }
    std::sort(survivors.begin(), survivors.end());
    return survivors;
}

std::weak_ordering ratio_compare(double phi1, const VariableGains& v2) {
    if (!(phi1 > 1.0)) throw Error(ErrorKind::DomainError, "ratio comparison needs phi > 1");
    const double p = char_poly_eval(v2, phi1);
    if (std::fabs(p) <= kRatioCompareTolerance) return std::weak_ordering::equivalent;
    return p > 0.0 ? std::weak_ordering::less : std::weak_ordering::greater;
}

double RatioCache::phi(const VariableGains& v) {
    const std::pair key{v.left(), v.right()};
    {
        std::shared_lock lock(mutex_);
        if (const auto it = phis_.find(key); it != phis_.end()) return it->second;
    }
    const double value = svb_ratio(v, options_).phi;
    std::unique_lock lock(mutex_);
    phis_.emplace(key, value);
    return value;
}

std::size_t RatioCache::size() const {
    std::shared_lock lock(mutex_);
    return phis_.size();
}

std::string_view height_estimate_name(HeightEstimate e) noexcept {
    switch (e) {
        case HeightEstimate::MinDepth: return "min-depth";
        case HeightEstimate::SingleVariable: return "single-variable";
        case HeightEstimate::LongestPath: return "longest-path";
        case HeightEstimate::WorstCasePath: return "worst-case-path";
    }
    return "unknown";
}

std::optional<HeightEstimate> parse_height_estimate(std::string_view name) noexcept {
    if (name == "min-depth") return HeightEstimate::MinDepth;
    if (name == "single-variable") return HeightEstimate::SingleVariable;
    if (name == "longest-path") return HeightEstimate::LongestPath;
    if (name == "worst-case-path") return HeightEstimate::WorstCasePath;
    return std::nullopt;
}

std::string policy_name(const ScoringPolicy& policy) {
    struct Visitor {
        std::string operator()(const LinearPolicy& p) const {
            return p.mu == kDefaultLinearMu ? "linear" : "linear:" + format_double(p.mu);
        }
        std::string operator()(const ProductPolicy& p) const {
            return p.eps == kDefaultProductEps ? "product" : "product:" + format_double(p.eps);
        }
        std::string operator()(const RatioPolicy&) const { return "ratio"; }
        std::string operator()(const SvtsPolicy& p) const {
            return p.depth_cap == kDefaultSvtsDepth ? "svts" : "svts:" + std::to_string(p.depth_cap);
        }
        std::string operator()(const HybridPolicy& p) const {
            std::string out = "hybrid:" + std::to_string(p.height);
            if (p.estimate != HybridPolicy{}.estimate) {
                out += ":";
                out += height_estimate_name(p.estimate);
            }
            return out;
        }
    };
    return std::visit(Visitor{}, policy);
}

std::optional<ScoringPolicy> parse_policy(std::string_view text) {
    std::vector<std::string_view> parts;
    for (std::size_t start = 0;;) {
        const std::size_t colon = text.find(':', start);
        parts.push_back(text.substr(start, colon == std::string_view::npos ? colon : colon - start));
        if (colon == std::string_view::npos) break;
        start = colon + 1;
    }
    const std::string_view kind = parts[0];
    const std::size_t args = parts.size() - 1;

    if (kind == "ratio" && args == 0) return RatioPolicy{};
    if (kind == "linear" && args <= 1) {
        LinearPolicy p;
        if (args == 1) {
            const auto mu = parse_number<double>(parts[1]);
            if (!mu || !(*mu >= 0.0 && *mu <= 1.0)) return std::nullopt;
            p.mu = *mu;
        }
        return p;
    }
    if (kind == "product" && args <= 1) {
        ProductPolicy p;
        if (args == 1) {
            const auto eps = parse_number<double>(parts[1]);
            if (!eps || !(*eps > 0.0) || !std::isfinite(*eps)) return std::nullopt;
            p.eps = *eps;
        }
        return p;
    }
    if (kind == "svts" && args <= 1) {
        SvtsPolicy p;
        if (args == 1) {
            const auto d = parse_number<std::uint32_t>(parts[1]);
            if (!d || *d < 1) return std::nullopt;
            p.depth_cap = *d;
        }
        return p;
    }
    if (kind == "hybrid" && args <= 2) {
        HybridPolicy p;
        if (args >= 1) {
            const auto h = parse_number<std::uint32_t>(parts[1]);
            if (!h) return std::nullopt;
            p.height = *h;
        }
        if (args == 2) {
            const auto e = parse_height_estimate(parts[2]);
            if (!e) return std::nullopt;
            p.estimate = *e;
        }
        return p;
    }
    return std::nullopt;
}

std::size_t select_linear(const SelectionContext& ctx, double mu) {
    require_candidates(ctx);
    return argmax(ctx.candidates, [mu](const VariableGains& v) { return score_linear(v, mu); });
}

std::size_t select_product(const SelectionContext& ctx, double eps) {
    require_candidates(ctx);
    return argmax(ctx.candidates, [eps](const VariableGains& v) { return score_product(v, eps); });
}

std::size_t select_ratio(const SelectionContext& ctx) {
    require_candidates(ctx);
    const std::vector<std::size_t> survivors = filter_dominated(ctx.candidates);

    std::size_t best = survivors[0];
    double best_product = score_product(ctx.candidates[best], kDefaultProductEps);
    for (const std::size_t i : survivors) {
        const double s = score_product(ctx.candidates[i], kDefaultProductEps);
        if (s > best_product) {
            best = i;
            best_product = s;
        }
    }

    double phi = ratio_of(ctx, ctx.candidates[best]);
    for (const std::size_t i : survivors) {
        if (i == best) continue;
        const auto order = ratio_compare(phi, ctx.candidates[i]);
        if (order == std::weak_ordering::less) {
            const double phi_i = ratio_of(ctx, ctx.candidates[i]);
            if (phi_i <= phi) {
                phi = phi_i;
                best = i;
            }
        } else if (order == std::weak_ordering::equivalent && i < best) {
            best = i;
        }
    }
    return best;
}

std::size_t select_svts(const SelectionContext& ctx, std::uint32_t depth_cap) {
    require_candidates(ctx);
    if (depth_cap < 1) throw Error(ErrorKind::DomainError, "svts depth cap must be at least 1");
    const double gap = ctx.gap;
    if (std::isinf(gap)) return select_ratio(ctx);

    std::optional<std::size_t> best;
    TreeSize best_size = TreeSize::infinite();
    for (const std::size_t i : filter_dominated(ctx.candidates)) {
        const VariableGains& v = ctx.candidates[i];
        TreeSize size = TreeSize::infinite();
        if (v.right() > 0.0) {
            const double depth = std::ceil(gap / v.right());
            if (depth <= depth_cap) {
                size = svb_size_closed_form(v, gap);
            } else {
                const double base = v.right() * depth_cap;
                size = svb_size_closed_form(v, base).times_power(ratio_of(ctx, v), gap - base);
            }
        }
        if (size.is_infinite()) continue;
        if (!best || size < best_size) {
            best = i;
            best_size = std::move(size);
        }
    }
    return best ? *best : select_ratio(ctx);
}

double estimate_ratio_height(const SelectionContext& ctx, HeightEstimate estimate) {
    require_candidates(ctx);
    const double gap = ctx.gap;
    if (std::isinf(gap)) return gap;
    if (!(gap > 0.0)) return 0.0;

    if (estimate == HeightEstimate::MinDepth) {
        return std::ceil(gap / ctx.candidates[select_ratio(ctx)].right());
    }
    if (estimate == HeightEstimate::SingleVariable) {
        return std::ceil(gap / ctx.candidates[select_ratio(ctx)].left());
    }

    const bool limited = !ctx.multiplicities.empty();
    if (limited && ctx.multiplicities.size() != ctx.candidates.size()) {
        throw Error(ErrorKind::InvalidInstance, "multiplicities must align with the candidates");
    }
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(ctx.candidates.size());
    for (std::size_t i = 0; i < ctx.candidates.size(); ++i) {
        if (limited && ctx.multiplicities[i] == 0) continue;
        order.emplace_back(estimate == HeightEstimate::WorstCasePath ? ctx.candidates[i].left()
                                                                     : ratio_of(ctx, ctx.candidates[i]),
                           i);
    }
    std::sort(order.begin(), order.end());

    double residual = gap;
    double height = 0.0;
    for (const auto& [phi, i] : order) {
        const double left = ctx.candidates[i].left();
        const double needed = std::ceil(residual / left);
        const double taken = limited ? std::min<double>(needed, ctx.multiplicities[i]) : needed;
        height += taken;
        if (taken == needed) return height;
        residual -= taken * left;
    }
    return std::numeric_limits<double>::infinity();
}

std::size_t select_hybrid(const SelectionContext& ctx, std::uint32_t height, HeightEstimate estimate) {
    require_candidates(ctx);
    if (height > 0 && estimate_ratio_height(ctx, estimate) <= height) {
        return select_product(ctx, kDefaultProductEps);
    }
    return select_ratio(ctx);
}

std::size_t select(const SelectionContext& ctx, const ScoringPolicy& policy) {
    struct Visitor {
        const SelectionContext& ctx;
        std::size_t operator()(const LinearPolicy& p) const { return select_linear(ctx, p.mu); }
        std::size_t operator()(const ProductPolicy& p) const { return select_product(ctx, p.eps); }
        std::size_t operator()(const RatioPolicy&) const { return select_ratio(ctx); }
        std::size_t operator()(const SvtsPolicy& p) const { return select_svts(ctx, p.depth_cap); }
        std::size_t operator()(const HybridPolicy& p) const { return select_hybrid(ctx, p.height, p.estimate); }
    };
    return std::visit(Visitor{ctx}, policy);
}

double iso_score_gain(double l, double phi) {
    if (!(l > 0.0) || !(phi > 1.0) || !std::isfinite(phi)) {
        throw Error(ErrorKind::DomainError, "iso-score gain needs l > 0 and phi > 1");
    }
    const double log_phi = std::log(phi);
    // 1 - phi^-l, kept accurate for phi^-l close to 1.
    const double complement = -std::expm1(-l * log_phi);
    if (!(complement > 0.0)) throw Error(ErrorKind::DomainError, "phi^-l rounds to 1");
    return -std::log(complement) / log_phi;
}

double iso_linear_gain(double l, const VariableGains& anchor, double mu) {
    if (!(mu > 0.0)) throw Error(ErrorKind::DomainError, "linear iso-score needs mu > 0");
    return (score_linear(anchor, mu) - (1.0 - mu) * l) / mu;
}

double iso_product_gain(double l, const VariableGains& anchor) {
    if (!(l > 0.0)) throw Error(ErrorKind::DomainError, "product iso-score needs l > 0");
    return anchor.left() * anchor.right() / l;
}

}  // namespace branchlab
