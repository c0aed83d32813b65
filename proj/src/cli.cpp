#include "nisio/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "nisio/config.hpp"
#include "nisio/errors.hpp"
#include "nisio/zoo/expression.hpp"

namespace nisio::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string fmt_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

void write_json(const fs::path& p, const ojson& j) { write_text(p, j.dump(2) + "\n"); }

ojson header(const RunConfig& c, const std::string& command) {
    ojson j;
    j["command"] = command;
    j["config_hash"] = c.hash();
    return j;
}

bool check(bool ok, const std::string& what) {
    if (!ok) std::cerr << "assertion failed: " << what << "\n";
    return ok;
}

unsigned exact_level(unsigned m) {
    unsigned level = 0;
    while ((1u << level) < m) ++level;
    return (1u << level) == m ? level : 0;
}

double epsilon_q(const RunConfig& c, double horizon, unsigned level) {
    return quadrature_tolerance(*c.family, horizon, std::clamp(level, 3u, 8u), {c.initial()}).epsilon;
}

RefineOptions control_refine(const RunConfig& c) {
    const unsigned level = exact_level(c.control.m);
    return level > 0 ? fixed_level(level) : c.solve.refine;
}

bool do_solve(const RunConfig& c, const fs::path& out) {
    const auto& family = *c.family;
    const auto u0 = c.initial();
    const auto r = nisio_value(family, c.solve.t, u0, c.solve.refine);
    const auto& g = *c.grid;

    std::string csv = g.kind() == GridKind::Tensor2D ? "x,y,u0,u_T\n" : "x,u0,u_T\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto s = g.state(i);
        csv += fmt_double(s[0]) + ",";
        if (g.kind() == GridKind::Tensor2D) csv += fmt_double(s[1]) + ",";
        csv += fmt_double(u0[i]) + "," + fmt_double(r.value[i]) + "\n";
    }
    write_text(out / "values.csv", csv);

    auto j = header(c, "solve");
    j["t"] = c.solve.t;
    j["converged"] = r.converged;
    j["final_level"] = r.levels.size() - 1;
    auto& levels = j["levels"] = ojson::array();
    for (std::size_t n = 0; n < r.levels.size(); ++n) {
        ojson e{{"level", n}, {"steps", std::uint64_t{1} << n}};
        e["increment"] = n == 0 ? ojson(nullptr) : ojson(r.increments[n - 1]);
        levels.push_back(std::move(e));
    }
    j["epsilon_q"] = epsilon_q(c, c.solve.t, static_cast<unsigned>(r.levels.size() - 1));

    bool ok = true;
    if (!c.asserts.solve_oracle.empty()) {
        const Expression oracle(c.asserts.solve_oracle);
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.x(i);
            if (c.asserts.solve_region && (x < (*c.asserts.solve_region)[0] || x > (*c.asserts.solve_region)[1]))
                continue;
            err = std::max(err, std::abs(r.value[i] - oracle(x)));
        }
        j["oracle_max_error"] = err;
        ok &= check(err <= *c.asserts.solve_max_error, "solve error " + fmt_double(err));
    }
    if (c.asserts.solve_converged) ok &= check(r.converged, "solve converged");
    j["assertions_pass"] = ok;
    write_json(out / "convergence.json", j);
    return ok;
}

bool do_properties(const RunConfig& c, const fs::path& out) {
    std::vector<GridFunction> probes;
    for (const auto& p : c.properties.probes) probes.push_back(make_probe(c.grid, p));
    auto suite = c.properties.suite;
    suite.seed = c.seed;
    const auto report = property_suite(*c.family, probes, c.properties.t_list, suite);
    auto j = header(c, "properties");
    j["t_list"] = c.properties.t_list;
    j["report"] = report.to_json();
    const bool ok = !c.asserts.properties_pass || check(report.pass(), "property suite");
    j["assertions_pass"] = ok;
    write_json(out / "properties.json", j);
    return ok;
}

bool do_dpp(const RunConfig& c, const fs::path& out) {
    const auto r = dpp_check(*c.family, c.dpp.s, c.dpp.t, c.initial(), c.solve.refine);
    auto j = header(c, "dpp");
    j["s"] = c.dpp.s;
    j["t"] = c.dpp.t;
    j["defect"] = r.defect;
    j["epsilon_q"] = epsilon_q(c, c.dpp.s + c.dpp.t, c.solve.refine.max_level);
    const bool ok = !c.asserts.dpp_max_defect || check(r.defect <= *c.asserts.dpp_max_defect, "dpp defect");
    j["assertions_pass"] = ok;
    write_json(out / "dpp.json", j);
    return ok;
}

bool do_control(const RunConfig& c, const fs::path& out) {
    const auto& family = *c.family;
    const auto u0 = c.initial();
    PropagatorCache cache(family);
    const auto greedy = greedy_policy(cache, c.solve.t, u0, c.control.m);
    write_json(out / "policy.json", greedy.policy.to_json());

    const auto nisio = nisio_value(cache, c.solve.t, u0, control_refine(c)).value;
    const double eps = epsilon_q(c, c.solve.t, control_refine(c).max_level);
    auto j = header(c, "control");
    j["t"] = c.solve.t;
    j["stages"] = c.control.m;
    j["gap"] = weighted_norm(nisio - greedy.value);
    j["min_slack"] = min_weighted_slack(nisio, greedy.value);
    j["epsilon_q"] = eps;
    if (c.control.random_trials > 0) {
        double worst = std::numeric_limits<double>::infinity();
        for (unsigned k = 0; k < c.control.random_trials; ++k) {
            const auto p = random_policy(family, c.solve.t, c.control.m, c.seed + k);
            worst = std::min(worst, min_weighted_slack(nisio, policy_value(cache, p, u0)));
        }
        j["random_trials"] = c.control.random_trials;
        j["random_worst_slack"] = worst;
        j["weak_duality_holds"] = worst >= -eps;
    }
    const bool ok = !c.asserts.control_max_gap ||
                    check(j["gap"].get<double>() <= *c.asserts.control_max_gap, "duality gap");
    j["assertions_pass"] = ok;
    write_json(out / "control.json", j);
    return ok;
}

bool do_mc(const RunConfig& c, const fs::path& out) {
    const auto& family = *c.family;
    const auto u0 = c.initial();
    SamplerSpec spec;
    spec.family = &family;
    spec.policy = greedy_policy(family, c.solve.t, u0, c.mc.m).policy;
    spec.paths = c.mc.paths;
    spec.seed = c.seed;
    spec.box = c.mc.box;
    std::function<double(const State&)> u;
    if (c.u0.kind == "csv")
        u = [&u0](const State& s) { return evaluate(u0, s); };
    else
        u = probe_function(c.u0);
    const unsigned level = exact_level(c.mc.m);
    const auto cmp = mc_compare(spec, u0, u, c.mc.x0, level > 0 ? fixed_level(level) : c.solve.refine);
    auto j = header(c, "mc");
    j["x0"] = {c.mc.x0[0], c.mc.x0[1]};
    j["t"] = c.solve.t;
    j["stages"] = c.mc.m;
    j["seed"] = c.seed;
    j["comparison"] = cmp.to_json();
    const bool ok = !c.asserts.mc_max_abs_z || check(std::abs(cmp.z_score) <= *c.asserts.mc_max_abs_z, "mc z-score");
    j["assertions_pass"] = ok;
    write_json(out / "mc.json", j);
    return ok;
}

bool do_report(const RunConfig& c, const fs::path& out) {
    auto j = header(c, "report");
    bool ok = true;
    auto& sections = j["sections"] = ojson::object();
    for (const char* name : {"convergence", "properties", "dpp", "control", "mc"}) {
        const auto p = out / (std::string(name) + ".json");
        if (!fs::exists(p)) {
            sections[name] = nullptr;
            continue;
        }
        std::ifstream in(p);
        auto doc = ojson::parse(in);
        if (doc.value("config_hash", "") != c.hash()) doc["stale"] = true;
        ok &= doc.value("assertions_pass", true);
        sections[name] = std::move(doc);
    }
    j["assertions_pass"] = ok;
    write_json(out / "report.json", j);
    return ok;
}

}  // namespace

std::optional<int> resolve_threads(std::optional<int> flag) {
    if (flag) return flag;
    if (const char* env = std::getenv("NISIO_THREADS")) {
        int n = 0;
        const auto* end = env + std::char_traits<char>::length(env);
        if (std::from_chars(env, end, n).ptr == end && n > 0) return n;
        throw ConfigError("NISIO_THREADS must be a positive integer");
    }
    return std::nullopt;
}

int run(const Options& o) {
    try {
        const auto threads = resolve_threads(o.threads);
        if (threads) {
            if (*threads < 1) throw ConfigError("--threads must be positive");
            omp_set_num_threads(*threads);
        }
        static constexpr std::string_view known[] = {"solve", "properties", "dpp", "control", "mc", "report"};
        if (std::find(std::begin(known), std::end(known), o.subcommand) == std::end(known))
            throw ConfigError("unknown subcommand '" + o.subcommand + "'");
        auto config = RunConfig::load(o.config_path);
        if (o.seed) {
            config.seed = *o.seed;
            config.source["seed"] = *o.seed;
        }
        const fs::path out(o.out_dir);
        fs::create_directories(out);
        bool ok = false;
        if (o.subcommand == "solve") ok = do_solve(config, out);
        else if (o.subcommand == "properties") ok = do_properties(config, out);
        else if (o.subcommand == "dpp") ok = do_dpp(config, out);
        else if (o.subcommand == "control") ok = do_control(config, out);
        else if (o.subcommand == "mc") ok = do_mc(config, out);
        else ok = do_report(config, out);
        return ok ? kOk : kAssertionFailed;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kSchemaError;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kSchemaError;
    } catch (const NumericalDegeneracy& e) {
        std::cerr << "numerical degeneracy: " << e.what() << "\n";
        return kNumericalDegeneracy;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericalDegeneracy;
    }
}

}  // namespace nisio::cli
