// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nisio/control.hpp"
#include "nisio/diagnostics.hpp"
#include "nisio/envelope.hpp"
#include "nisio/mc.hpp"
#include "nisio/probes.hpp"
#include "nisio/zoo/chain.hpp"
#include "nisio/zoo/gbm.hpp"
#include "nisio/zoo/heat.hpp"
#include "nisio/zoo/koopman.hpp"
#include "nisio/zoo/ou.hpp"
#include "nisio/zoo/scaled.hpp"
#include "nisio/zoo/stable.hpp"

using namespace nisio;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

GridPtr share(WeightedGrid g) { return std::make_shared<const WeightedGrid>(std::move(g)); }

// default heat configuration: [-8, 8], dx 0.01, kappa (1+|x|)^-6
GridPtr heat_grid() { return share(WeightedGrid::uniform(-8, 8, 0.01, {6.0})); }

SemigroupFamily family_of(std::vector<MemberPtr> members) {
    SemigroupFamily f(std::move(members));
    return f;
}

SemigroupFamily gheat(const GridPtr& g) {
    return family_of({std::make_shared<HeatMember>(g, HeatSpec{0.5}), std::make_shared<HeatMember>(g, HeatSpec{1.0})});
}

GridFunction sample(const GridPtr& g, const std::function<double(double)>& f) { return GridFunction::sample(g, f); }

std::vector<unsigned char> region(const GridPtr& g, const std::function<bool(double)>& keep) {
    std::vector<unsigned char> r(g->size());
    for (std::size_t i = 0; i < g->size(); ++i) r[i] = keep(g->x(i)) ? 1 : 0;
    return r;
}

double max_err(const GridFunction& u, const std::function<double(double)>& oracle, double radius) {
    double e = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double x = u.grid()->x(i);
        if (std::abs(x) <= radius) e = std::max(e, std::abs(u[i] - oracle(x)));
    }
    return e;
}

double max_diff(const GridFunction& a, const GridFunction& b, double radius) {
    double e = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a.grid()->x(i)) <= radius) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

// ---------------------------------------------------------------------------

Outcome convex_quadratic() {
    auto g = heat_grid();
    const auto fam = gheat(g);
    const auto r = nisio_value(fam, 1.0, sample(g, [](double x) { return x * x; }), fixed_level(8));
    const auto oracle = [](double x) { return x * x + 1.0; };
    const double err1 = max_err(r.levels[1], oracle, 2.0);
    double drift = 0;
    for (std::size_t n = 2; n < r.levels.size(); ++n) drift = std::max(drift, max_diff(r.levels[n], r.levels[1], 2.0));
    return {err1 <= 1e-3 && drift <= 1e-9,
            "level-1 error " + num(err1) + " (<= 1e-3), drift through level 8 " + num(drift) + " (<= 1e-9)"};
}

Outcome concave_quadratic() {
    auto g = heat_grid();
    const auto fam = gheat(g);
    const auto r = nisio_value(fam, 1.0, sample(g, [](double x) { return -x * x; }), fixed_level(8));
    const double err = max_err(r.value, [](double x) { return -x * x - 0.25; }, 2.0);
    return {err <= 1e-3, "max error on |x|<=2 " + num(err) + " (<= 1e-3)"};
}

Outcome dynamic_programming() {
    auto g = heat_grid();
    const auto fam = gheat(g);
    const double sin_defect = dpp_check(fam, 0.5, 0.5, sample(g, [](double x) { return std::sin(x); }), fixed_level(6)).defect;
    const double quad_defect = dpp_check(fam, 0.5, 0.5, sample(g, [](double x) { return x * x; }), fixed_level(6)).defect;
    return {sin_defect <= 5e-3 && quad_defect <= 1e-6,
            "sin defect " + num(sin_defect) + " (<= 5e-3), x^2 defect " + num(quad_defect) + " (<= 1e-6)"};
}

Outcome partition_refinement() {
    auto g = heat_grid();
    const auto fam = gheat(g);
    std::vector<GridFunction> probes{make_probe(g, {"sin"}), make_probe(g, {"bump"}), make_probe(g, {"call"})};
    SuiteOptions opt;
    opt.partition_pairs = 20;
    const auto rep = property_suite(fam, probes, {1.0}, opt);
    const auto& c = rep.check("partition_refinement");
    const double eps = rep.eps_q.epsilon;
    return {c.pass && eps <= 1e-4,
            "min slack " + num(c.worst_slack) + " vs -eps_q, eps_q " + num(eps) + " (<= 1e-4)"};
}

struct ZooCase {
    std::string name;
    SemigroupFamily family;
    std::vector<GridFunction> probes;
};

std::vector<double> chain_q(double a, double b) {
    // birth-death style rates on four states
    return {-a, a, 0, 0, b, -(a + b), a, 0, 0, b, -(a + b), a, 0, 0, b, -b};
}

std::vector<double> chain_q2() { return {-1, 0.5, 0.5, 0, 0, -2, 1, 1, 3, 0, -3, 0, 0.25, 0.25, 0.5, -1}; }

std::vector<ZooCase> zoo() {
    std::vector<ZooCase> cases;
    {
        auto g = share(WeightedGrid::uniform(-8, 8, 0.02, {6.0}));
        cases.push_back({"heat", gheat(g), {make_probe(g, {"quadratic"}), make_probe(g, {"neg-quadratic"}), make_probe(g, {"sin"})}});
    }
    {
        auto g = share(WeightedGrid::log_symmetric(4, 0.02, {4.0}));
        ProbeSpec call{"call"};
        call.strike = 1.0;
        cases.push_back({"gbm",
                         family_of({std::make_shared<GBMMember>(g, GBMSpec{0.05, 0.2}),
                                    std::make_shared<GBMMember>(g, GBMSpec{0.1, 0.3})}),
                         {make_probe(g, {"quadratic"}), make_probe(g, call)}});
    }
    {
        auto g = share(WeightedGrid::uniform(-8, 8, 0.02, {6.0}));
        cases.push_back({"ou",
                         family_of({std::make_shared<OUMember>(g, OUSpec{1, {-1.0}, {0.0}, {1.0}}),
                                    std::make_shared<OUMember>(g, OUSpec{1, {-0.5}, {0.2}, {0.25}})}),
                         {make_probe(g, {"quadratic"}), make_probe(g, {"sin"})}});
    }
    {
        auto g = share(WeightedGrid::tensor({-4, 0.2, 41}, {-4, 0.2, 41}, {4.0}));
        cases.push_back({"ou-2d",
                         family_of({std::make_shared<OUMember>(g, OUSpec{2, {-1, 0, 0, -1}, {0, 0}, {0.5, 0, 0, 0.5}}),
                                    std::make_shared<OUMember>(g, OUSpec{2, {-0.5, 0, 0, -0.25}, {0, 0}, {0.1, 0, 0, 0.2}})}),
                         {make_probe(g, {"quadratic"}), make_probe(g, {"sin"})}});
    }
    {
        auto g = share(WeightedGrid::uniform(-4, 4, 0.01));
        cases.push_back({"koopman",
                         family_of({std::make_shared<KoopmanMember>(g, KoopmanSpec{"-x", 1.0}),
                                    std::make_shared<KoopmanMember>(g, KoopmanSpec{"sin(x)", 1.0})}),
                         {make_probe(g, {"sin"}), make_probe(g, {"bump"})}});
    }
    {
        auto g = share(WeightedGrid::labels(4));
        cases.push_back({"chain",
                         family_of({std::make_shared<ChainMember>(g, ChainSpec{4, chain_q(1.0, 0.5)}),
                                    std::make_shared<ChainMember>(g, ChainSpec{4, chain_q2()})}),
                         {GridFunction(g, std::vector<double>{0, 1, 4, 9}),
                          GridFunction(g, std::vector<double>{1, -1, 0.5, 2})}});
    }
    {
        auto g = share(WeightedGrid::periodic(-M_PI, 2 * M_PI, 256));
        cases.push_back({"stable",
                         family_of({std::make_shared<StableMember>(g, StableLevySpec{0.5}),
                                    std::make_shared<StableMember>(g, StableLevySpec{0.9})}),
                         {make_probe(g, {"cos"}), make_probe(g, {"sin"})}});
    }
    {
        auto g = share(WeightedGrid::uniform(-8, 8, 0.02, {6.0}));
        auto base = std::make_shared<HeatMember>(g, HeatSpec{1.0});
        cases.push_back({"scaled",
                         family_of({std::make_shared<ScaledMember>(base, 0.0), std::make_shared<ScaledMember>(base, 0.5),
                                    std::make_shared<ScaledMember>(base, 1.0)}),
                         {make_probe(g, {"quadratic"}), make_probe(g, {"sin"})}});
    }
    for (auto& c : cases) {
        // alpha measured at the smallest step the suite uses
        c.family.set_bounds(measure_bounds(c.family, 0.25 / 64));
    }
    return cases;
}

Outcome dominance_and_contraction() {
    bool ok = true;
    std::string detail;
    for (auto& c : zoo()) {
        SuiteOptions opt;
        opt.partition_pairs = 2;
        const auto rep = property_suite(c.family, c.probes, {0.25, 1.0}, opt);
        const auto& dom = rep.check("envelope_dominance");
        const auto& con = rep.check("kappa_contraction");
        ok = ok && dom.pass && con.pass;
        detail += c.name + " [" + num(dom.worst_slack) + ", " + num(con.worst_slack) + " / " +
                  num(rep.eps_q.epsilon) + "] ";
    }
    return {ok, "min slacks [dominance, contraction / eps_q]: " + detail};
}

Outcome control_duality() {
    auto g = heat_grid();
    const auto fam = gheat(g);
    const auto u = sample(g, [](double x) { return std::sin(x) + 0.1 * x * x; });
    PropagatorCache cache(fam);
    const auto nv = nisio_value(cache, 1.0, u, fixed_level(6)).value;
    const auto gr = greedy_policy(cache, 1.0, u, 64);
    const double gap = weighted_norm(nv - gr.value);
    const double eps = quadrature_tolerance(fam, 1.0, 6, {u}).epsilon;
    double worst = std::numeric_limits<double>::infinity();
    for (std::uint64_t trial = 0; trial < 100; ++trial)
        worst = std::min(worst, min_weighted_slack(nv, policy_value(cache, random_policy(fam, 1.0, 64, 1000 + trial), u)));
    return {gap <= 1e-12 && worst >= -eps,
            "greedy gap " + num(gap) + " (<= 1e-12), worst random slack " + num(worst) + " vs -eps_q " + num(eps)};
}

Outcome monte_carlo() {
    auto g = heat_grid();
    const auto fam = gheat(g);
    const auto u = sample(g, [](double x) { return x * x; });
    const auto gr = greedy_policy(fam, 1.0, u, 64);
    SamplerSpec spec{&fam, gr.policy, 1000000, 20240601};
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = mc_value(spec, {0.0, 0.0}, [](const State& s) { return s[0] * s[0]; });
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double dev = std::abs(r.estimate - 1.0);
    return {dev <= 3 * r.std_error && r.std_error <= 2e-3 && secs <= 120,
            "estimate " + num(r.estimate) + ", SE " + num(r.std_error) + ", |dev|/SE " + num(dev / r.std_error) +
                ", " + num(secs) + " s"};
}

// Richardson self-convergence order of D(h) = (S(h)u - u)/h; differences at or
// below the floor count as exact
struct Order {
    double order;
    double limit_error;  // ||(2 D(h/2) - D(h)) - A u|| on the mask
};

Order richardson(const TransitionOperator& m, const GridFunction& u, double h, const std::vector<unsigned char>& mask) {
    auto D = [&](double s) { return (1.0 / s) * (m.apply(s, u) - u); };
    const auto d0 = D(h), d1 = D(h / 2), d2 = D(h / 4);
    const auto gen = m.generator(u);
    std::vector<unsigned char> both(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) both[i] = mask[i] && gen.valid[i];
    const double floor = 1e-9 * std::max(1.0, weighted_norm(d2, both));
    const double e0 = weighted_norm(d0 - d1, both), e1 = weighted_norm(d1 - d2, both);
    double order = std::numeric_limits<double>::infinity();
    if (e0 > floor || e1 > floor) order = std::log2(e0 / std::max(e1, floor));
    return {order, weighted_norm(2.0 * d2 - d1 - gen.values, both)};
}

Outcome generator_consistency() {
    struct Case {
        std::string name;
        MemberPtr member;
        std::vector<unsigned char> mask;
        double h;
    };
    std::vector<Case> cases;
    auto line = share(WeightedGrid::uniform(-8, 8, 0.01, {4.0}));
    auto inner = region(line, [](double x) { return std::abs(x) <= 3; });
    cases.push_back({"heat", std::make_shared<HeatMember>(line, HeatSpec{1.0}), inner, 0.04});
    cases.push_back({"ou", std::make_shared<OUMember>(line, OUSpec{1, {-1.0}, {0.3}, {1.0}}), inner, 0.04});
    auto logg = share(WeightedGrid::log_symmetric(5, 0.005, {4.0}));
    cases.push_back({"gbm", std::make_shared<GBMMember>(logg, GBMSpec{0.1, 0.3}),
                     region(logg, [](double x) { return std::abs(x) >= std::exp(-3.0) && std::abs(x) <= 5; }), 0.04});
    auto fine = share(WeightedGrid::uniform(-4, 4, 0.0005, {4.0}));
    cases.push_back({"koopman", std::make_shared<KoopmanMember>(fine, KoopmanSpec{"-x", 1.0}),
                     region(fine, [](double x) { return std::abs(x) <= 3; }), 0.04});
    auto labels = share(WeightedGrid::labels(4));
    cases.push_back({"chain", std::make_shared<ChainMember>(labels, ChainSpec{4, chain_q2()}),
                     std::vector<unsigned char>(4, 1), 0.04});

    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
        for (const char* probe : {"quadratic", "cos"}) {
            const auto& g = c.member->grid();
            const auto u = g->kind() == GridKind::Labels
                               ? sample(g, [&](double x) { return probe[0] == 'q' ? x * x : std::cos(x); })
                               : make_probe(g, {probe});
            const auto r = richardson(*c.member, u, c.h, c.mask);
            ok = ok && r.order >= 0.9;
            detail += c.name + "/" + (probe[0] == 'q' ? "x^2" : "cos") + " " + num(r.order) + " ";
        }
    }
    return {ok, "orders (>= 0.9): " + detail};
}

Outcome viscosity() {
    auto g = heat_grid();
    const auto fam = gheat(g);
    // every step of the level-6 chain is a snapshot
    const double dt = 1.0 / 64;
    const auto convex = envelope_snapshots(fam, sample(g, [](double x) { return x * x; }), 1.0, 6, 1);
    const double r1 = viscosity_residual(fam, convex, dt, region(g, [](double x) { return std::abs(x) <= 2; })).max_interior_residual;
    const double K = 0.5;
    ProbeSpec call{"call"};
    call.strike = K;
    const auto payoff = envelope_snapshots(fam, make_probe(g, call), 1.0, 6, 1);
    const double r2 =
        viscosity_residual(fam, payoff, dt, region(g, [&](double x) { return std::abs(x) <= 2 && std::abs(x - K) > 0.2; }))
            .max_interior_residual;
    return {r1 <= 1e-6 && r2 <= 5e-2, "x^2 residual " + num(r1) + " (<= 1e-6), call residual " + num(r2) + " (<= 5e-2)"};
}

Outcome strong_continuity() {
    bool ok = true;
    std::string detail;
    const std::vector<double> hs{0.08, 0.04, 0.02, 0.01};
    auto line = share(WeightedGrid::uniform(-8, 8, 0.01, {6.0}));
    auto labels = share(WeightedGrid::labels(4));
    const std::vector<std::pair<std::string, SemigroupFamily>> fams{
        {"heat", gheat(line)},
        {"ou", family_of({std::make_shared<OUMember>(line, OUSpec{1, {-1.0}, {0.0}, {1.0}})})},
        {"chain", family_of({std::make_shared<ChainMember>(labels, ChainSpec{4, chain_q2()})})},
    };
    for (const auto& [name, fam] : fams) {
        const auto u = sample(fam.grid(), [](double x) { return x * x; });
        const auto r = strong_continuity_probe(fam, u, hs);
        ok = ok && r.relative_residual <= 0.05;
        detail += name + " " + num(r.relative_residual) + " ";
    }
    auto heat = gheat(line);
    heat.set_bounds(measure_bounds(heat, 0.01));
    const auto cd = cutoff_decay_probe(heat, 0.5, {-1.0, 0.0, 2.0}, {0.08, 0.04, 0.02, 0.01}, fixed_level(4));
    auto chain = family_of({std::make_shared<ChainMember>(labels, ChainSpec{4, chain_q2()})});
    const auto cc = cutoff_decay_probe(chain, 0.5, {0.0, 3.0}, {0.08, 0.04, 0.02, 0.01}, fixed_level(4));
    ok = ok && cd.monotone && cd.within_bound && cc.monotone && cc.within_bound;
    detail += "| cut-off heat " + std::string(cd.monotone && cd.within_bound ? "ok" : "violated") + ", chain " +
              (cc.monotone && cc.within_bound ? "ok" : "violated");
    return {ok, "relative residuals (<= 0.05): " + detail};
}

Outcome stable_spectral() {
    auto g = share(WeightedGrid::periodic(-M_PI, 2 * M_PI, 512));
    StableMember single(g, {0.5});
    const auto v = single.apply(1.0, sample(g, [](double x) { return std::cos(2 * x); }));
    // exp(-t |xi|^{2 alpha}) at xi = 2, alpha = 1/2
    const double err = max_err(v, [](double x) { return std::exp(-2.0) * std::cos(2 * x); }, 4.0);
    const auto fam = family_of({std::make_shared<StableMember>(g, StableLevySpec{0.5}),
                                std::make_shared<StableMember>(g, StableLevySpec{0.9})});
    std::vector<GridFunction> probes{make_probe(g, {"cos"}), make_probe(g, {"sin"}), make_probe(g, {"bump"})};
    SuiteOptions opt;
    const auto rep = property_suite(fam, probes, {0.25, 1.0}, opt);
    std::string failed;
    for (const auto& c : rep.checks)
        if (!c.pass && !c.skipped) failed += c.name + " ";
    return {err <= 1e-6 && rep.pass() && rep.eps_q.epsilon <= 1e-6,
            "multiplier error " + num(err) + " (<= 1e-6), suite " + (rep.pass() ? "pass" : "fail: " + failed) +
                ", eps_q " + num(rep.eps_q.epsilon) + " (<= 1e-6)"};
}

// dense DP oracle: v <- max_rows exp(h Q_k) v over 2^14 steps, expm by Eigen
Eigen::Vector4d chain_oracle(const std::vector<std::vector<double>>& qs, double t, const Eigen::Vector4d& u, int steps) {
    std::vector<Eigen::Matrix4d> P;
    for (const auto& q : qs) {
        Eigen::Matrix4d Q;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) Q(i, j) = q[4 * i + j];
        P.push_back((Q * (t / steps)).exp());
    }
    Eigen::Vector4d v = u;
    for (int s = 0; s < steps; ++s) {
        Eigen::Vector4d next = P[0] * v;
        for (std::size_t k = 1; k < P.size(); ++k) next = next.cwiseMax(P[k] * v);
        v = next;
    }
    return v;
}

Outcome chain_brute_force() {
    const std::vector<std::vector<double>> qs{chain_q(1.0, 0.5), chain_q2()};
    const Eigen::Vector4d u0(0.0, 1.0, -1.0, 2.0);
    const Eigen::Vector4d oracle = chain_oracle(qs, 1.0, u0, 1 << 14);

    auto g = share(WeightedGrid::labels(4));
    const auto fam = family_of({std::make_shared<ChainMember>(g, ChainSpec{4, qs[0]}),
                                std::make_shared<ChainMember>(g, ChainSpec{4, qs[1]})});
    const auto v = nisio_value(fam, 1.0, GridFunction(g, std::vector<double>{0.0, 1.0, -1.0, 2.0}), fixed_level(10)).value;
    double err = 0;
    for (int i = 0; i < 4; ++i) err = std::max(err, std::abs(v[i] - oracle(i)));
    const auto v14 = nisio_value(fam, 1.0, GridFunction(g, std::vector<double>{0.0, 1.0, -1.0, 2.0}), fixed_level(14)).value;
    double err14 = 0;
    for (int i = 0; i < 4; ++i) err14 = std::max(err14, std::abs(v14[i] - oracle(i)));
    return {err <= 1e-6, "level-10 error " + num(err) + " (<= 1e-6); level-14 error " + num(err14)};
}

}  // namespace

int main() {
    struct Item {
        int id;
        const char* title;
        Outcome (*run)();
    };
    const Item items[] = {
        {1, "G-heat convex quadratic", convex_quadratic},
        {2, "G-heat concave quadratic", concave_quadratic},
        {3, "dynamic programming principle", dynamic_programming},
        {4, "partition refinement monotonicity", partition_refinement},
        {5, "envelope dominance and kappa-contraction", dominance_and_contraction},
        {6, "control duality", control_duality},
        {7, "Monte Carlo representation", monte_carlo},
        {8, "generator consistency", generator_consistency},
        {9, "viscosity residual", viscosity},
        {10, "strong continuity and cut-off decay", strong_continuity},
        {11, "alpha-stable spectral check", stable_spectral},
        {12, "Markov-chain envelope vs dense DP", chain_brute_force},
    };
    int failures = 0;
    for (const auto& it : items) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = it.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failures;
        std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", it.id, it.title, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(items)) - failures, std::size(items));
    return failures == 0 ? 0 : 1;
}
