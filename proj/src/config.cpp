#include "nisio/config.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>

#include "nisio/errors.hpp"
#include "nisio/zoo/chain.hpp"
#include "nisio/zoo/gbm.hpp"
#include "nisio/zoo/heat.hpp"
#include "nisio/zoo/koopman.hpp"
#include "nisio/zoo/ou.hpp"
#include "nisio/zoo/scaled.hpp"
#include "nisio/zoo/stable.hpp"

namespace nisio {

namespace {

using json = nlohmann::json;

// Object view that rejects keys outside the allowed set.
class Obj {
public:
    Obj(const json& j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw ConfigError(path_ + ": expected an object");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [k, v] : j.items())
            if (!ok.count(k)) throw ConfigError(path_ + ": unknown key '" + k + "'");
    }

    [[nodiscard]] bool has(const char* k) const { return j_.contains(k); }
    [[nodiscard]] const json& at(const char* k) const {
        if (!j_.contains(k)) throw ConfigError(path_ + ": missing key '" + std::string(k) + "'");
        return j_.at(k);
    }
    [[nodiscard]] std::string where(const char* k) const { return path_ + "." + k; }

    [[nodiscard]] double num(const char* k) const {
        const auto& v = at(k);
        if (!v.is_number()) throw ConfigError(where(k) + ": expected a number");
        return v.get<double>();
    }
    [[nodiscard]] double num(const char* k, double fallback) const { return has(k) ? num(k) : fallback; }

    [[nodiscard]] std::uint64_t count(const char* k) const {
        const auto& v = at(k);
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            throw ConfigError(where(k) + ": expected a nonnegative integer");
        return v.get<std::uint64_t>();
    }
    [[nodiscard]] std::uint64_t count(const char* k, std::uint64_t fallback) const {
        return has(k) ? count(k) : fallback;
    }

    [[nodiscard]] std::string str(const char* k) const {
        const auto& v = at(k);
        if (!v.is_string()) throw ConfigError(where(k) + ": expected a string");
        return v.get<std::string>();
    }
    [[nodiscard]] std::string str(const char* k, const std::string& fallback) const {
        return has(k) ? str(k) : fallback;
    }

    [[nodiscard]] bool flag(const char* k, bool fallback) const {
        if (!has(k)) return fallback;
        const auto& v = at(k);
        if (!v.is_boolean()) throw ConfigError(where(k) + ": expected true or false");
        return v.get<bool>();
    }

    [[nodiscard]] std::vector<double> nums(const char* k) const {
        const auto& v = at(k);
        if (!v.is_array()) throw ConfigError(where(k) + ": expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(where(k) + ": expected an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

private:
    const json& j_;
    std::string path_;
};

KappaSpec parse_kappa(const Obj& o) {
    if (!o.has("kappa")) return {};
    const auto& k = o.at("kappa");
    if (k.is_string()) {
        if (k.get<std::string>() == "constant") return {0.0};
        throw ConfigError(o.where("kappa") + ": expected \"constant\" or {\"p\": ...}");
    }
    Obj ko(k, o.where("kappa"), {"p"});
    return {ko.num("p")};
}

BoundaryPolicy parse_boundary(const Obj& o) {
    const auto b = o.str("boundary", "mass-renormalize");
    if (b == "mass-renormalize") return BoundaryPolicy::MassRenormalize;
    if (b == "reflect") return BoundaryPolicy::Reflect;
    throw ConfigError(o.where("boundary") + ": expected mass-renormalize or reflect");
}

Axis parse_axis(const json& j, const std::string& path) {
    Obj o(j, path, {"min", "max", "step"});
    const double lo = o.num("min"), hi = o.num("max"), step = o.num("step");
    if (!(step > 0.0) || !(hi > lo)) throw ConfigError(path + ": need min < max and step > 0");
    const double n = std::round((hi - lo) / step);
    if (std::abs(n * step - (hi - lo)) > 1e-9 * std::max(1.0, hi - lo))
        throw ConfigError(path + ": step does not divide the interval");
    return Axis{lo, step, static_cast<std::size_t>(n) + 1};
}

GridPtr parse_grid(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("grid: missing key 'kind'");
    const auto kind = j.at("kind").is_string() ? j.at("kind").get<std::string>() : std::string();
    if (kind == "uniform") {
        Obj o(j, "grid", {"kind", "x_min", "x_max", "dx", "kappa", "boundary"});
        return std::make_shared<const WeightedGrid>(
            WeightedGrid::uniform(o.num("x_min"), o.num("x_max"), o.num("dx"), parse_kappa(o), parse_boundary(o)));
    }
    if (kind == "periodic") {
        Obj o(j, "grid", {"kind", "x_min", "period", "points", "kappa"});
        return std::make_shared<const WeightedGrid>(
            WeightedGrid::periodic(o.num("x_min"), o.num("period"), o.count("points"), parse_kappa(o)));
    }
    if (kind == "log-symmetric") {
        Obj o(j, "grid", {"kind", "half_width", "dz", "kappa", "boundary"});
        return std::make_shared<const WeightedGrid>(
            WeightedGrid::log_symmetric(o.num("half_width"), o.num("dz"), parse_kappa(o), parse_boundary(o)));
    }
    if (kind == "tensor2d") {
        Obj o(j, "grid", {"kind", "x", "y", "kappa", "boundary"});
        return std::make_shared<const WeightedGrid>(WeightedGrid::tensor(
            parse_axis(o.at("x"), "grid.x"), parse_axis(o.at("y"), "grid.y"), parse_kappa(o), parse_boundary(o)));
    }
    if (kind == "labels") {
        Obj o(j, "grid", {"kind", "states", "weights"});
        std::vector<double> w;
        if (o.has("weights")) w = o.nums("weights");
        return std::make_shared<const WeightedGrid>(WeightedGrid::labels(o.count("states"), std::move(w)));
    }
    throw ConfigError("grid.kind: expected uniform, periodic, log-symmetric, tensor2d or labels");
}

std::vector<double> flat_matrix(const Obj& o, const char* k, std::size_t* rows) {
    const auto& v = o.at(k);
    if (!v.is_array()) throw ConfigError(o.where(k) + ": expected an array");
    std::vector<double> out;
    if (!v.empty() && v.front().is_array()) {
        for (const auto& row : v) {
            if (!row.is_array() || row.size() != v.size()) throw ConfigError(o.where(k) + ": expected a square matrix");
            for (const auto& e : row) {
                if (!e.is_number()) throw ConfigError(o.where(k) + ": expected numbers");
                out.push_back(e.get<double>());
            }
        }
        if (rows) *rows = v.size();
        return out;
    }
    out = o.nums(k);
    if (rows) *rows = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(out.size()))));
    return out;
}

MemberPtr parse_member(const json& j, const GridPtr& grid, const std::string& path) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw ConfigError(path + ": missing member 'type'");
    const auto type = j.at("type").get<std::string>();
    if (type == "heat") {
        Obj o(j, path, {"type", "sigma"});
        return std::make_shared<HeatMember>(grid, HeatSpec{o.num("sigma")});
    }
    if (type == "gbm") {
        Obj o(j, path, {"type", "mu", "sigma"});
        return std::make_shared<GBMMember>(grid, GBMSpec{o.num("mu"), o.num("sigma")});
    }
    if (type == "ou") {
        Obj o(j, path, {"type", "dim", "B", "m", "C"});
        OUSpec s;
        s.dim = o.count("dim", 1);
        s.B = flat_matrix(o, "B", nullptr);
        s.m = o.nums("m");
        s.C = flat_matrix(o, "C", nullptr);
        return std::make_shared<OUMember>(grid, std::move(s));
    }
    if (type == "koopman") {
        Obj o(j, path, {"type", "field", "lipschitz_hint"});
        return std::make_shared<KoopmanMember>(grid, KoopmanSpec{o.str("field"), o.num("lipschitz_hint")});
    }
    if (type == "stable") {
        Obj o(j, path, {"type", "alpha"});
        return std::make_shared<StableMember>(grid, StableLevySpec{o.num("alpha")});
    }
    if (type == "chain") {
        Obj o(j, path, {"type", "Q", "require_conservative"});
        ChainSpec s;
        s.Q = flat_matrix(o, "Q", &s.states);
        if (s.states * s.states != s.Q.size()) throw ConfigError(o.where("Q") + ": expected a square matrix");
        return std::make_shared<ChainMember>(grid, std::move(s), o.flag("require_conservative", true));
    }
    if (type == "scaled") {
        Obj o(j, path, {"type", "lambda", "base"});
        return std::make_shared<ScaledMember>(parse_member(o.at("base"), grid, o.where("base")), o.num("lambda"));
    }
    throw ConfigError(path + ".type: unknown member type '" + type + "'");
}

SemigroupFamily parse_family(const json& j, const GridPtr& grid) {
    Obj o(j, "family", {"members", "range"});
    std::vector<MemberPtr> members;
    if (o.has("members")) {
        const auto& arr = o.at("members");
        if (!arr.is_array()) throw ConfigError("family.members: expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i)
            members.push_back(parse_member(arr[i], grid, "family.members[" + std::to_string(i) + "]"));
    }
    if (o.has("range")) {
        Obj r(o.at("range"), "family.range", {"base", "parameter", "from", "to", "count"});
        const auto param = r.str("parameter");
        const double from = r.num("from"), to = r.num("to");
        const auto n = r.count("count");
        if (n < 1) throw ConfigError("family.range.count: must be >= 1");
        for (std::uint64_t k = 0; k < n; ++k) {
            json m = r.at("base");
            if (!m.is_object()) throw ConfigError("family.range.base: expected an object");
            m[param] = n == 1 ? from : from + (to - from) * static_cast<double>(k) / static_cast<double>(n - 1);
            members.push_back(parse_member(m, grid, "family.range[" + std::to_string(k) + "]"));
        }
    }
    if (members.empty()) throw ConfigError("family: needs at least one member");
    return SemigroupFamily(std::move(members));
}

ProbeSpec parse_probe(const json& j, const std::string& path) {
    Obj o(j, path, {"probe", "csv", "value", "strike", "center", "width", "frequency"});
    ProbeSpec p;
    if (o.has("csv")) {
        if (o.has("probe")) throw ConfigError(path + ": give either 'probe' or 'csv'");
        p.kind = "csv";
        p.csv_path = o.str("csv");
        return p;
    }
    p.kind = o.str("probe");
    p.value = o.num("value", p.value);
    p.strike = o.num("strike", p.strike);
    p.center = o.num("center", p.center);
    p.width = o.num("width", p.width);
    p.frequency = o.num("frequency", p.frequency);
    (void)probe_function(p);  // rejects unknown kinds
    return p;
}

State parse_state(const Obj& o, const char* k) {
    const auto& v = o.at(k);
    if (v.is_number()) return {v.get<double>(), 0.0};
    const auto xs = o.nums(k);
    if (xs.empty() || xs.size() > 2) throw ConfigError(o.where(k) + ": expected 1 or 2 coordinates");
    return {xs[0], xs.size() > 1 ? xs[1] : 0.0};
}

double positive(double v, const std::string& what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(what + ": must be positive");
    return v;
}

}  // namespace

RunConfig RunConfig::parse(const json& j) {
    Obj top(j, "config",
            {"description", "seed", "grid", "family", "u0", "solve", "properties", "dpp", "control", "mc", "assert"});
    RunConfig c;
    c.source = j;
    c.seed = top.count("seed", 1);
    c.grid = parse_grid(top.at("grid"));
    c.family.emplace(parse_family(top.at("family"), c.grid));
    c.u0 = parse_probe(top.at("u0"), "u0");

    if (top.has("solve")) {
        Obj o(top.at("solve"), "solve", {"t", "tol", "max_level", "min_level"});
        c.solve.t = o.num("t", c.solve.t);
        if (!(c.solve.t >= 0.0) || !std::isfinite(c.solve.t)) throw ConfigError("solve.t: must be >= 0");
        c.solve.refine.tol = positive(o.num("tol", c.solve.refine.tol), "solve.tol");
        c.solve.refine.max_level = static_cast<unsigned>(o.count("max_level", c.solve.refine.max_level));
        c.solve.refine.min_level = static_cast<unsigned>(o.count("min_level", c.solve.refine.min_level));
        if (c.solve.refine.max_level < 1 || c.solve.refine.max_level > 30)
            throw ConfigError("solve.max_level: must lie in 1..30");
        if (c.solve.refine.min_level > c.solve.refine.max_level)
            throw ConfigError("solve.min_level: exceeds max_level");
    }
    if (top.has("properties")) {
        Obj o(top.at("properties"), "properties",
              {"probes", "t_list", "partition_pairs", "partition_level", "level", "dpp_tolerance"});
        if (o.has("probes")) {
            const auto& arr = o.at("probes");
            if (!arr.is_array()) throw ConfigError("properties.probes: expected an array");
            for (std::size_t i = 0; i < arr.size(); ++i)
                c.properties.probes.push_back(parse_probe(arr[i], "properties.probes[" + std::to_string(i) + "]"));
        }
        if (o.has("t_list")) c.properties.t_list = o.nums("t_list");
        for (double t : c.properties.t_list) positive(t, "properties.t_list");
        auto& s = c.properties.suite;
        s.partition_pairs = static_cast<unsigned>(o.count("partition_pairs", s.partition_pairs));
        s.partition_level = static_cast<unsigned>(o.count("partition_level", s.partition_level));
        if (s.partition_level < 1 || s.partition_level > 20) throw ConfigError("properties.partition_level: 1..20");
        if (o.has("level")) {
            const auto level = static_cast<unsigned>(o.count("level"));
            if (level < 1 || level > 30) throw ConfigError("properties.level: must lie in 1..30");
            s.refine = fixed_level(level);
        }
        s.dpp_tolerance = positive(o.num("dpp_tolerance", s.dpp_tolerance), "properties.dpp_tolerance");
    }
    if (c.properties.probes.empty()) c.properties.probes.push_back(c.u0);
    if (top.has("dpp")) {
        Obj o(top.at("dpp"), "dpp", {"s", "t"});
        c.dpp.s = o.num("s", c.dpp.s);
        c.dpp.t = o.num("t", c.dpp.t);
        if (!(c.dpp.s >= 0.0) || !(c.dpp.t >= 0.0)) throw ConfigError("dpp: s and t must be >= 0");
    }
    if (top.has("control")) {
        Obj o(top.at("control"), "control", {"m", "random_trials"});
        c.control.m = static_cast<unsigned>(o.count("m", c.control.m));
        c.control.random_trials = static_cast<unsigned>(o.count("random_trials", c.control.random_trials));
        if (c.control.m < 1) throw ConfigError("control.m: must be >= 1");
    }
    if (top.has("mc")) {
        Obj o(top.at("mc"), "mc", {"paths", "x0", "m", "box"});
        c.mc.paths = o.count("paths", c.mc.paths);
        if (c.mc.paths < 100) throw ConfigError("mc.paths: must be >= 100");
        if (o.has("x0")) c.mc.x0 = parse_state(o, "x0");
        c.mc.m = static_cast<unsigned>(o.count("m", c.mc.m));
        if (c.mc.m < 1) throw ConfigError("mc.m: must be >= 1");
        if (o.has("box")) {
            Obj b(o.at("box"), "mc.box", {"lo", "hi"});
            c.mc.box = SafetyBox{parse_state(b, "lo"), parse_state(b, "hi")};
        }
    }
    if (top.has("assert")) {
        Obj o(top.at("assert"), "assert",
              {"solve_max_error", "solve_converged", "properties_pass", "dpp_max_defect", "control_max_gap",
               "mc_max_abs_z"});
        auto& a = c.asserts;
        if (o.has("solve_max_error")) {
            Obj e(o.at("solve_max_error"), "assert.solve_max_error", {"oracle", "tol", "region"});
            a.solve_oracle = e.str("oracle");
            a.solve_max_error = positive(e.num("tol"), "assert.solve_max_error.tol");
            if (e.has("region")) {
                const auto r = e.nums("region");
                if (r.size() != 2 || !(r[0] <= r[1])) throw ConfigError("assert.solve_max_error.region: [lo, hi]");
                a.solve_region = std::array<double, 2>{r[0], r[1]};
            }
        }
        a.solve_converged = o.flag("solve_converged", false);
        a.properties_pass = o.flag("properties_pass", false);
        if (o.has("dpp_max_defect")) a.dpp_max_defect = o.num("dpp_max_defect");
        if (o.has("control_max_gap")) a.control_max_gap = o.num("control_max_gap");
        if (o.has("mc_max_abs_z")) a.mc_max_abs_z = o.num("mc_max_abs_z");
    }
    c.family->set_bounds(measure_bounds(*c.family, c.solve.t > 0.0 ? c.solve.t : 1.0));
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse(j);
}

std::string RunConfig::hash() const {
    const auto text = source.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

GridFunction RunConfig::initial() const { return make_probe(grid, u0); }

}  // namespace nisio
