#include "dispatch.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "branchlab/error.hpp"
#include "branchlab/instance.hpp"
#include "branchlab/multivar.hpp"
#include "branchlab/scoring.hpp"
#include "branchlab/sim.hpp"
#include "branchlab/svb.hpp"

namespace branchlab::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kBudgetEnv = "BRANCHLAB_BUDGET";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class T>
T parse_number(std::string_view s, std::string_view what) {
    T value{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw UsageError("invalid " + std::string(what) + ": '" + std::string(s) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    for (std::size_t start = 0;;) {
        const std::size_t pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) return parts;
        start = pos + 1;
    }
}

// "l,r"; malformed text is a usage error, bad values a domain error.
VariableGains parse_var(std::string_view text) {
    const auto parts = split(text, ',');
    if (parts.size() != 2) throw UsageError("--var expects l,r but got '" + std::string(text) + "'");
    return make_variable(parse_number<double>(parts[0], "gain"), parse_number<double>(parts[1], "gain"));
}

std::vector<VariableGains> parse_vars(const std::vector<std::string>& texts) {
    std::vector<VariableGains> vars;
    for (const auto& t : texts) vars.push_back(parse_var(t));
    return vars;
}

json size_json(const TreeSize& size) {
    if (size.is_exact()) return size.exact_value().get_str();
    if (size.is_infinite()) return "inf";
    const auto m = size.magnitude();
    return json{{"mantissa", m.mantissa}, {"exp10", m.exp10}};
}

std::string csv_cell(const json& value) {
    if (value.is_string()) {
        const auto s = value.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string quoted = "\"";
        for (const char c : s) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
        return quoted + "\"";
    }
    if (value.is_null()) return "";
    if (value.is_object() && value.contains("mantissa") && value.contains("exp10")) {
        return value["mantissa"].dump() + "e" + value["exp10"].dump();
    }
    if (value.is_structured()) return csv_cell(json(value.dump()));
    return value.dump();
}

void write_csv(std::ostream& out, const json& rows) {
    if (rows.empty()) return;
    bool first = true;
    for (const auto& [key, _] : rows.front().items()) {
        out << (first ? "" : ",") << csv_cell(json(key));
        first = false;
    }
    out << '\n';
    for (const auto& row : rows) {
        first = true;
        for (const auto& [_, value] : row.items()) {
            out << (first ? "" : ",") << csv_cell(value);
            first = false;
        }
        out << '\n';
    }
}

// JSON objects print on one line; CSV prints "rows" when present, otherwise
// the object as a single row.
void emit(std::ostream& out, const std::string& format, const json& payload) {
    if (format == "csv") {
        if (payload.contains("rows")) {
            write_csv(out, payload["rows"]);
        } else {
            write_csv(out, json::array({payload}));
        }
        return;
    }
    out << payload.dump() << '\n';
}

std::size_t resolve_budget(const std::optional<std::size_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv(kBudgetEnv); env && *env) {
        return parse_number<std::size_t>(env, kBudgetEnv);
    }
    return kDefaultStateCap;
}

ScoringPolicy parse_policy_or_throw(const std::string& text) {
    const auto policy = parse_policy(text);
    if (!policy) throw UsageError("unknown policy '" + text + "'");
    return *policy;
}

double truncate_digits(double x, int digits) {
    if (!(x > 0.0) || !std::isfinite(x)) return x;
    const double scale = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(x))));
    return std::floor(x * scale) / scale;
}

BranchingInstance read_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read instance file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return instance_from_json(buffer.str());
}

struct Options {
    std::vector<std::string> vars;
    std::vector<std::uint32_t> mults;
    std::vector<double> gaps;
    std::vector<std::string> policies;
    std::vector<std::string> data_types;
    std::string format = "json";
    std::string method;
    std::string mode = "mvb";
    std::string figure;
    std::string instance_path;
    std::string reference;
    std::string weights;
    std::optional<std::size_t> budget;
    std::size_t n = 100;
    std::size_t instances = 10;
    std::uint64_t seed = 1;
    std::uint64_t capacity = 0;
    unsigned jobs = 1;
    bool exact = false;
    bool approx = false;
    double tol = 1e-12;
    int max_iterations = 200;
    double base_gap = 0.0;
    double left = 0.0;
    double mu = kDefaultLinearMu;
    double gap_min = 1;
    double gap_max = 50;
    double step = 1;
    double l_min = 10;
    double l_max = 100;
    double r_min = 21;
    double r_max = 100;
    double second_left = 2;
    std::uint32_t multiplicity_cap = kDefaultMultiplicityCap;
};

double single_gap(const Options& o) {
    if (o.gaps.size() != 1) throw UsageError("exactly one --gap is required");
    return o.gaps[0];
}

const VariableGains& single_var(const std::vector<VariableGains>& vars) {
    if (vars.size() != 1) throw UsageError("exactly one --var is required");
    return vars[0];
}

SizeOptions size_options(const Options& o) {
    SizeOptions size;
    size.state_cap = resolve_budget(o.budget);
    size.arithmetic = o.approx ? Arithmetic::Approx : Arithmetic::Exact;
    return size;
}

RatioOptions ratio_options(const Options& o) {
    RatioOptions ratio;
    if (!o.method.empty()) {
        ratio.method = parse_ratio_method(o.method);
        if (!ratio.method) throw UsageError("unknown ratio method '" + o.method + "'");
    }
    ratio.tol = o.tol;
    ratio.max_iterations = o.max_iterations;
    return ratio;
}

// Integral values print without a fractional part.
json num(double x) {
    if (std::isfinite(x) && x == std::floor(x) && std::fabs(x) < 9e15) return static_cast<std::int64_t>(x);
    return x;
}

json var_json(const VariableGains& v) { return json::array({num(v.left()), num(v.right())}); }

json cmd_svb_size(const Options& o) {
    const VariableGains v = single_var(parse_vars(o.vars));
    const double gap = single_gap(o);
    const std::string method = o.method.empty() ? "recurrence" : o.method;
    TreeSize size;
    if (method == "recurrence") {
        size = svb_size_recurrence(v, gap, size_options(o));
    } else if (method == "closed-form") {
        size = svb_size_closed_form(v, gap, size_options(o));
    } else if (method == "approx") {
        const double base = o.base_gap > 0.0 ? o.base_gap : std::min(gap, 50.0 * v.right());
        size = svb_size_approx(v, gap, base, ratio_options(o));
    } else {
        throw UsageError("--method must be recurrence, closed-form or approx");
    }
    return json{{"size", size_json(size)}};
}

json cmd_ratio(const Options& o) {
    const VariableGains v = single_var(parse_vars(o.vars));
    const RatioResult r = svb_ratio(v, ratio_options(o));
    return json{{"phi", r.phi},
                {"phi_5_digits", truncate_digits(r.phi, 5)},
                {"method", ratio_method_name(r.method)},
                {"iterations", r.iterations},
                {"residual", r.residual}};
}

json cmd_mvb(const Options& o) {
    const BranchingInstance inst(parse_vars(o.vars), single_gap(o));
    const MvbSolution s = mvb_min_size(inst, inst.gap(), size_options(o));
    return json{{"size", size_json(s.size)}, {"root_choice", s.root_choice}, {"ratio", mvb_ratio(inst)}};
}

BranchingInstance gvb_instance(const Options& o) {
    if (!o.instance_path.empty()) {
        BranchingInstance inst = read_instance(o.instance_path);
        const double gap = o.gaps.empty() ? inst.gap() : single_gap(o);
        std::vector<std::uint32_t> mults =
            inst.multiplicities() ? *inst.multiplicities() : std::vector<std::uint32_t>(inst.size(), 1);
        return BranchingInstance(inst.variables(), gap, std::move(mults));
    }
    std::vector<VariableGains> vars = parse_vars(o.vars);
    std::vector<std::uint32_t> mults = o.mults;
    if (mults.empty()) mults.assign(vars.size(), 1);
    if (mults.size() != vars.size()) throw UsageError("--mult must be given once per --var");
    return BranchingInstance(std::move(vars), single_gap(o), std::move(mults));
}

json cmd_gvb(const Options& o) {
    const BranchingInstance inst = gvb_instance(o);
    GvbOptions options;
    options.size = size_options(o);
    options.multiplicity_cap = o.multiplicity_cap;
    const GvbSolution s = gvb_min_size(inst, inst.gap(), options);
    return json{{"size", size_json(s.size)}, {"states", s.states_visited}};
}

json cmd_threshold(const Options& o) {
    const double gap = single_gap(o);
    if (gap != std::floor(gap) || gap < 1) throw UsageError("--gap must be a positive integer");
    const BranchingInstance inst(parse_vars(o.vars), gap);
    const auto h = mvb_root_threshold(inst, static_cast<std::int64_t>(gap), size_options(o), ratio_options(o));
    return json{{"threshold", h ? json(*h) : json(nullptr)}, {"max_gap", static_cast<std::int64_t>(gap)}};
}

json cmd_score(const Options& o) {
    const std::vector<VariableGains> vars = parse_vars(o.vars);
    if (vars.empty()) throw UsageError("at least one --var is required");
    const ScoringPolicy policy = parse_policy_or_throw(o.policies.empty() ? "product" : o.policies.front());
    const double gap = o.gaps.empty() ? std::numeric_limits<double>::infinity() : single_gap(o);
    json rows = json::array();
    for (const auto& v : vars) {
        json row{{"l", num(v.left())}, {"r", num(v.right())}};
        if (const auto* p = std::get_if<LinearPolicy>(&policy)) {
            row["score"] = score_linear(v, p->mu);
        } else if (const auto* p = std::get_if<ProductPolicy>(&policy)) {
            row["score"] = score_product(v, p->eps);
        } else if (std::holds_alternative<RatioPolicy>(policy)) {
            row["score"] = svb_ratio(v, ratio_options(o)).phi;
        } else if (std::holds_alternative<SvtsPolicy>(policy)) {
            if (std::isinf(gap)) throw UsageError("svts scores need --gap");
            row["score"] = size_json(svb_size_closed_form(v, gap, size_options(o)));
        } else {
            throw Error(ErrorKind::DomainError, "hybrid has no per-variable score; use select");
        }
        rows.push_back(std::move(row));
    }
    return json{{"policy", policy_name(policy)}, {"rows", rows}};
}

json cmd_select(const Options& o) {
    const std::vector<VariableGains> vars = parse_vars(o.vars);
    if (vars.empty()) throw UsageError("at least one --var is required");
    const ScoringPolicy policy = parse_policy_or_throw(o.policies.empty() ? "ratio" : o.policies.front());
    SelectionContext ctx;
    ctx.gap = o.gaps.empty() ? std::numeric_limits<double>::infinity() : single_gap(o);
    ctx.candidates = vars;
    ctx.ratio = ratio_options(o);
    const std::size_t i = select(ctx, policy);
    return json{{"index", i}, {"variable", var_json(vars[i])}, {"policy", policy_name(policy)}};
}

json iso_row(double l, const VariableGains& anchor, double phi, double mu) {
    json row{{"l", num(l)}};
    try {
        row["r_ratio"] = iso_score_gain(l, phi);
    } catch (const Error&) {
        row["r_ratio"] = nullptr;
    }
    row["r_linear"] = iso_linear_gain(l, anchor, mu);
    row["r_product"] = iso_product_gain(l, anchor);
    return row;
}

json cmd_iso_score(const Options& o) {
    const VariableGains anchor = single_var(parse_vars(o.vars));
    if (!(o.left > 0.0)) throw UsageError("--left must be positive");
    return iso_row(o.left, anchor, svb_ratio(anchor, ratio_options(o)).phi, o.mu);
}

json cmd_simulate(const Options& o) {
    std::vector<ScoringPolicy> policies;
    for (const auto& p : o.policies) policies.push_back(parse_policy_or_throw(p));

    if (!o.instance_path.empty()) {
        const BranchingInstance inst = read_instance(o.instance_path);
        const double gap = o.gaps.empty() ? inst.gap() : single_gap(o);
        if (policies.empty()) policies = {LinearPolicy{}, ProductPolicy{}, RatioPolicy{}};
        SimOptions options;
        options.size = size_options(o);
        if (!o.exact) options.size.arithmetic = Arithmetic::Approx;
        json rows = json::array();
        for (const auto& policy : policies) {
            rows.push_back({{"policy", policy_name(policy)},
                            {"size", size_json(simulate_policy_tree(inst, gap, policy, options))}});
        }
        return json{{"instance", json::parse(to_json(inst))}, {"gap", num(gap)}, {"rows", rows}};
    }

    std::vector<DataType> types;
    for (const auto& code : o.data_types) {
        const auto dt = parse_data_type(code);
        if (!dt) throw UsageError("--data-type must be one of B, U, V, X");
        types.push_back(*dt);
    }
    ExperimentReport report;
    if (o.mode == "mvb") {
        MvbExperimentConfig cfg;
        if (!types.empty()) cfg.data_types = types;
        if (!policies.empty()) cfg.policies = policies;
        cfg.n = o.n;
        cfg.gap = o.gaps.empty() ? cfg.gap : single_gap(o);
        cfg.instances = o.instances;
        cfg.seed = o.seed;
        cfg.exact = o.exact;
        cfg.jobs = o.jobs;
        cfg.state_cap = resolve_budget(o.budget);
        report = run_mvb_experiment(cfg);
    } else if (o.mode == "gvb") {
        GvbExperimentConfig cfg;
        if (!types.empty()) cfg.data_types = types;
        if (!policies.empty()) cfg.policies = policies;
        cfg.n = o.n;
        cfg.gaps = o.gaps;
        cfg.instances = o.instances;
        cfg.seed = o.seed;
        cfg.exact = o.exact;
        cfg.jobs = o.jobs;
        cfg.state_cap = resolve_budget(o.budget);
        const std::string reference = o.reference.empty() ? "product" : o.reference;
        const auto it = std::find_if(cfg.policies.begin(), cfg.policies.end(),
                                     [&](const ScoringPolicy& p) { return policy_name(p) == reference; });
        if (it == cfg.policies.end()) throw UsageError("--reference must name one of the policies");
        cfg.reference = static_cast<std::size_t>(it - cfg.policies.begin());
        report = run_gvb_experiment(cfg);
    } else {
        throw UsageError("--mode must be mvb or gvb");
    }
    if (o.format == "csv") return json{{"csv", report_csv(report)}};
    return json::parse(report_summary_json(report));
}

json cmd_knapsack_check(const Options& o) {
    std::vector<std::uint64_t> weights;
    for (const auto part : split(o.weights, ',')) weights.push_back(parse_number<std::uint64_t>(part, "weight"));
    const BranchingInstance inst = knapsack_to_gvb(weights, o.capacity);
    GvbOptions options;
    options.size = size_options(o);
    options.multiplicity_cap = std::max<std::uint32_t>(o.multiplicity_cap, static_cast<std::uint32_t>(inst.size()));
    const TreeSize size = gvb_min_size(inst, inst.gap(), options).size;
    const std::uint64_t covers = count_knapsack_covers(weights, o.capacity);
    BigInt expected = 1;
    expected <<= static_cast<unsigned long>(weights.size() + 2);
    expected -= 1;
    expected -= BigInt(2) * BigInt(static_cast<unsigned long>(covers));
    const bool holds = size.is_exact() && size.exact_value() == expected;
    return json{{"n", weights.size()},
                {"covers", covers},
                {"tree_size", size_json(size)},
                {"expected", expected.get_str()},
                {"holds", holds}};
}

json figure_treesize(const Options& o) {
    const std::vector<VariableGains> vars = parse_vars(o.vars.empty() ? std::vector<std::string>{"10,10", "2,49"}
                                                                      : o.vars);
    const SizeOptions size = size_options(o);
    json rows = json::array();
    for (double g = o.gap_min; g <= o.gap_max + 1e-9; g += o.step) {
        json row{{"gap", num(g)}};
        for (const auto& v : vars) {
            std::ostringstream name;
            name << "(" << v.left() << "," << v.right() << ")";
            row[name.str()] = size_json(svb_size_recurrence(v, g, size));
        }
        if (vars.size() > 1) row["mvb"] = size_json(mvb_min_size(BranchingInstance(vars, g), g, size).size);
        rows.push_back(std::move(row));
    }
    return json{{"rows", rows}};
}

json figure_ratio_surface(const Options& o) {
    json rows = json::array();
    const RatioOptions ratio = ratio_options(o);
    for (double l = o.l_min; l <= o.l_max + 1e-9; l += o.step) {
        for (double r = l; r <= o.l_max + 1e-9; r += o.step) {
            rows.push_back({{"l", num(l)}, {"r", num(r)}, {"phi", svb_ratio(make_variable(l, r), ratio).phi}});
        }
    }
    return json{{"rows", rows}};
}

json figure_threshold_sweep(const Options& o) {
    const VariableGains base = o.vars.empty() ? make_variable(10, 10) : single_var(parse_vars(o.vars));
    const double gap = o.gaps.empty() ? 2000.0 : single_gap(o);
    json rows = json::array();
    for (double r = o.r_min; r <= o.r_max + 1e-9; r += o.step) {
        const BranchingInstance inst({base, make_variable(o.second_left, r)}, gap);
        const auto h = mvb_root_threshold(inst, static_cast<std::int64_t>(gap), size_options(o), ratio_options(o));
        rows.push_back({{"r", num(r)}, {"H", h ? json(*h) : json(nullptr)}});
    }
    return json{{"rows", rows}};
}

json figure_iso_score(const Options& o) {
    const VariableGains anchor = o.vars.empty() ? make_variable(100, 100) : single_var(parse_vars(o.vars));
    const double phi = svb_ratio(anchor, ratio_options(o)).phi;
    json rows = json::array();
    for (double l = o.l_max; l >= o.l_min - 1e-9; l -= o.step) rows.push_back(iso_row(l, anchor, phi, o.mu));
    return json{{"rows", rows}};
}

json cmd_figure(const Options& o) {
    if (o.figure == "treesize-curves") return figure_treesize(o);
    if (o.figure == "ratio-surface") return figure_ratio_surface(o);
    if (o.figure == "threshold-sweep") return figure_threshold_sweep(o);
    if (o.figure == "iso-score") return figure_iso_score(o);
    throw UsageError("unknown figure '" + o.figure + "'");
}

void add_format(CLI::App* sub, Options& o) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

void add_budget(CLI::App* sub, Options& o) {
    sub->add_option("--budget", o.budget, "DP state cap (overrides BRANCHLAB_BUDGET)");
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tree-size calculus for branch-and-bound variable selection", "branchlab"};
    app.require_subcommand(1);
    Options o;

    struct Command {
        CLI::App* sub;
        json (*run)(const Options&);
    };
    std::vector<Command> commands;
    auto add = [&](const char* name, const char* help, json (*run)(const Options&)) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_format(sub, o);
        commands.push_back({sub, run});
        return sub;
    };

    auto* svb = add("svb-size", "Single-variable tree size", cmd_svb_size);
    svb->add_option("--var", o.vars, "Gains l,r")->required();
    svb->add_option("--gap", o.gaps, "Gap to close")->required();
    svb->add_option("--method", o.method, "recurrence, closed-form or approx");
    svb->add_option("--base-gap", o.base_gap, "Exact base gap F of the approx method");
    svb->add_flag("--approx", o.approx, "Log-domain arithmetic");
    add_budget(svb, o);

    auto* ratio = add("ratio", "Growth ratio of a variable", cmd_ratio);
    ratio->add_option("--var", o.vars, "Gains l,r")->required();
    ratio->add_option("--method", o.method, "fixed_point, bisection, newton, laguerre or direct");
    ratio->add_option("--tol", o.tol, "Residual tolerance");
    ratio->add_option("--max-iter", o.max_iterations, "Iteration cap");

    auto* mvb = add("mvb", "Minimum tree size with reusable variables", cmd_mvb);
    mvb->add_option("--var", o.vars, "Gains l,r (repeatable)")->required();
    mvb->add_option("--gap", o.gaps, "Gap to close")->required();
    mvb->add_flag("--approx", o.approx, "Log-domain arithmetic");
    add_budget(mvb, o);

    auto* gvb = add("gvb", "Minimum tree size with per-path multiplicities", cmd_gvb);
    gvb->add_option("--var", o.vars, "Gains l,r (repeatable)");
    gvb->add_option("--mult", o.mults, "Multiplicity per --var (default 1)");
    gvb->add_option("--gap", o.gaps, "Gap to close");
    gvb->add_option("--instance", o.instance_path, "Instance JSON file");
    gvb->add_option("--multiplicity-cap", o.multiplicity_cap, "Cap on the multiplicity sum");
    gvb->add_flag("--approx", o.approx, "Log-domain arithmetic");
    add_budget(gvb, o);

    auto* threshold = add("threshold", "Gap above which the best-ratio variable is a root choice", cmd_threshold);
    threshold->add_option("--var", o.vars, "Gains l,r (repeatable, integer)")->required();
    threshold->add_option("--gap", o.gaps, "Largest gap examined")->required();
    add_budget(threshold, o);

    auto* score = add("score", "Per-variable scores", cmd_score);
    score->add_option("--var", o.vars, "Gains l,r (repeatable)")->required();
    score->add_option("--policy", o.policies, "linear[:MU], product[:EPS], ratio or svts[:D]");
    score->add_option("--gap", o.gaps, "Gap (svts)");
    add_budget(score, o);

    auto* sel = add("select", "Variable chosen by a scoring policy", cmd_select);
    sel->add_option("--var", o.vars, "Gains l,r (repeatable)")->required();
    sel->add_option("--policy", o.policies, "Scoring policy");
    sel->add_option("--gap", o.gaps, "Gap at the node (default infinite)");

    auto* iso = add("iso-score", "Right gains matching an anchor's scores", cmd_iso_score);
    iso->add_option("--var", o.vars, "Anchor l,r")->required();
    iso->add_option("--left", o.left, "Left gain")->required();
    iso->add_option("--mu", o.mu, "Linear weight");

    auto* sim = add("simulate", "Policy trees on random or given instances", cmd_simulate);
    sim->add_option("--instance", o.instance_path, "Instance JSON file");
    sim->add_option("--mode", o.mode, "mvb or gvb")->check(CLI::IsMember({"mvb", "gvb"}));
    sim->add_option("--policy", o.policies, "Scoring policy (repeatable)");
    sim->add_option("--reference", o.reference, "Reference policy of the gvb mode");
    sim->add_option("--data-type", o.data_types, "B, U, V or X (repeatable)");
    sim->add_option("--n", o.n, "Variables per instance")->check(CLI::PositiveNumber);
    sim->add_option("--seed", o.seed, "Master seed");
    sim->add_option("--instances", o.instances, "Instances per data type");
    sim->add_option("--gap", o.gaps, "Gap (repeatable in gvb mode)");
    sim->add_flag("--exact", o.exact, "Exact big-integer sizes");
    sim->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    add_budget(sim, o);

    auto* knap = add("knapsack-check", "Checks the covering-knapsack tree-size identity", cmd_knapsack_check);
    knap->add_option("--weights", o.weights, "Comma-separated positive weights")->required();
    knap->add_option("--capacity", o.capacity, "Capacity W")->required();
    add_budget(knap, o);

    auto* fig = add("figure", "Plot data as CSV rows", cmd_figure);
    fig->add_option("--figure", o.figure, "treesize-curves, ratio-surface, threshold-sweep or iso-score")
        ->required();
    fig->add_option("--var", o.vars, "Variables, base or anchor l,r");
    fig->add_option("--gap", o.gaps, "Largest gap (threshold-sweep)");
    fig->add_option("--gap-min", o.gap_min, "First gap (treesize-curves)");
    fig->add_option("--gap-max", o.gap_max, "Last gap (treesize-curves)");
    fig->add_option("--step", o.step, "Grid step");
    fig->add_option("--l-min", o.l_min, "Smallest left gain");
    fig->add_option("--l-max", o.l_max, "Largest gain");
    fig->add_option("--r-min", o.r_min, "First r of (l2, r) (threshold-sweep)");
    fig->add_option("--r-max", o.r_max, "Last r (threshold-sweep)");
    fig->add_option("--second-left", o.second_left, "l2 of (l2, r) (threshold-sweep)");
    fig->add_option("--mu", o.mu, "Linear weight (iso-score)");
    add_budget(fig, o);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << "Run with --help for usage.\n";
        return kExitUsage;
    }

    try {
        for (const auto& c : commands) {
            if (!c.sub->parsed()) continue;
            if (c.sub == fig && !c.sub->count("--format")) o.format = "csv";
            const json payload = c.run(o);
            if (payload.contains("csv")) {
                out << payload["csv"].get<std::string>();
            } else {
                emit(out, o.format, payload);
            }
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << e.what() << '\n' << "Run with --help for usage.\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << json{{"error", {{"kind", error_kind_name(e.kind())}, {"message", e.what()}}}}.dump() << '\n';
        return kExitDomainError;
    }
    return kExitUsage;
}

}  // namespace branchlab::cli
