#include "nisio/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "nisio/errors.hpp"

namespace nisio {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double min_pointwise(const GridFunction& a, const GridFunction& b) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) m = std::min(m, a[i] - b[i]);
    return m;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double min_grid_spacing(const WeightedGrid& g) {
    switch (g.kind()) {
        case GridKind::Tensor2D: return std::min(g.axis_x().step, g.axis_y().step);
        case GridKind::LogSymmetric: {
            double m = std::numeric_limits<double>::infinity();
            for (std::size_t i = 1; i < g.size(); ++i) m = std::min(m, g.x(i) - g.x(i - 1));
            return m;
        }
        default: return g.spacing();
    }
}

GridFunction cutoff(const GridPtr& grid, std::size_t center, double delta) {
    const auto& g = *grid;
    GridFunction phi(grid);
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (g.kind() == GridKind::Labels)
            phi[j] = j == center ? 0.0 : 1.0;
        else
            phi[j] = 1.0 - smooth_bump(g.distance(center, j) / delta);
    }
    return phi;
}

// nonnegative index bump used as the monotonicity perturbation
GridFunction index_bump(const GridPtr& grid) {
    const auto n = static_cast<double>(grid->size());
    GridFunction w(grid);
    for (std::size_t i = 0; i < grid->size(); ++i)
        w[i] = smooth_bump((static_cast<double>(i) - 0.5 * (n - 1.0)) / std::max(1.0, 0.25 * n));
    if (grid->size() <= 4) w[grid->size() / 2] = 1.0;
    return w;
}

}  // namespace

StrongContinuity strong_continuity_probe(const SemigroupFamily& family, const GridFunction& u,
                                         const std::vector<double>& h_list) {
    if (h_list.size() < 3) throw InvalidInput("strong continuity probe needs at least three steps");
    for (std::size_t i = 0; i < h_list.size(); ++i) {
        if (!(h_list[i] > 0.0)) throw InvalidInput("probe steps must be positive");
        if (i > 0 && !(h_list[i] < h_list[i - 1])) throw InvalidInput("probe steps must decrease");
    }
    StrongContinuity r;
    r.h = h_list;
    for (double h : h_list) {
        double worst = 0.0;
        for (const auto& m : family.members()) worst = std::max(worst, weighted_norm(m->apply(h, u) - u));
        r.rates.push_back(worst);
    }
    const std::size_t first = h_list.size() - 3;
    double num = 0.0, den = 0.0, rr = 0.0;
    for (std::size_t i = first; i < h_list.size(); ++i) {
        num += r.rates[i] * h_list[i];
        den += h_list[i] * h_list[i];
        rr += r.rates[i] * r.rates[i];
    }
    r.slope = num / den;
    double res = 0.0;
    for (std::size_t i = first; i < h_list.size(); ++i) {
        const double e = r.rates[i] - r.slope * h_list[i];
        res += e * e;
    }
    r.relative_residual = rr > 0.0 ? std::sqrt(res / rr) : 0.0;
    for (std::size_t i = 1; i < h_list.size(); ++i) {
        const double a = r.rates[i - 1], b = r.rates[i];
        r.orders.push_back(a > 0.0 && b > 0.0 ? std::log(a / b) / std::log(h_list[i - 1] / h_list[i]) : kNaN);
    }
    return r;
}

CutoffDecay cutoff_decay_probe(const SemigroupFamily& family, double delta, const std::vector<double>& x_list,
                               std::vector<double> h_list, RefineOptions refine, double eps_q) {
    const auto& grid = family.grid();
    const auto& g = *grid;
    if (x_list.empty()) throw InvalidInput("cutoff probe needs at least one centre");
    if (g.kind() != GridKind::Labels && !(delta >= 2.0 * min_grid_spacing(g)))
        throw InvalidInput("cutoff radius below two grid spacings is unresolved");
    for (double h : h_list)
        if (!(h >= 0.0) || !std::isfinite(h)) throw InvalidInput("probe steps must be finite and >= 0");
    if (std::find(h_list.begin(), h_list.end(), 0.0) == h_list.end()) h_list.push_back(0.0);
    std::sort(h_list.begin(), h_list.end());
    h_list.erase(std::unique(h_list.begin(), h_list.end()), h_list.end());

    std::vector<std::size_t> centers;
    std::vector<GridFunction> phis;
    for (double x : x_list) {
        centers.push_back(g.nearest(State{x, 0.0}));
        phis.push_back(cutoff(grid, centers.back(), delta));
    }
    CutoffDecay r;
    r.h = h_list;
    for (std::size_t c = 0; c < centers.size(); ++c) {
        double bound = 0.0;
        for (const auto& m : family.members()) {
            const auto gen = m->generator(phis[c]);
            for (std::size_t j = 0; j < g.size(); ++j)
                if (gen.valid[j]) bound = std::max(bound, std::abs(gen.values[j]));
        }
        r.generator_bound = std::max(r.generator_bound, g.kappa(centers[c]) * bound);
    }
    PropagatorCache cache(family);
    const double h0 = h_list.back();
    const double growth = std::exp(family.bounds().alpha * h0);
    for (double h : h_list) {
        double v = 0.0;
        if (h > 0.0) {
            for (std::size_t c = 0; c < centers.size(); ++c) {
                const auto s = nisio_value(cache, h, phis[c], refine).value;
                v = std::max(v, g.kappa(centers[c]) * s[centers[c]]);
            }
        }
        r.values.push_back(v);
        r.slope_bound.push_back(r.generator_bound * growth * h);
    }
    r.monotone = r.values.front() == 0.0;
    r.within_bound = true;
    for (std::size_t i = 1; i < r.values.size(); ++i) {
        if (r.values[i] + eps_q < r.values[i - 1]) r.monotone = false;
        if (r.values[i] > r.slope_bound[i] + eps_q) r.within_bound = false;
    }
    return r;
}

std::vector<GridFunction> envelope_snapshots(const SemigroupFamily& family, const GridFunction& u,
                                             double horizon, unsigned level, unsigned every) {
    if (!(horizon > 0.0)) throw InvalidInput("snapshot horizon must be positive");
    if (every == 0) throw InvalidInput("snapshot stride must be positive");
    const auto pi = Partition::dyadic(horizon, level);
    const double h = pi.gaps().front();
    PropagatorCache cache(family);
    std::vector<GridFunction> out{u};
    GridFunction v = u;
    for (std::size_t j = 1; j <= pi.gaps().size(); ++j) {
        v = envelope_step(cache, h, v, nullptr);
        if (j % every == 0 || j == pi.gaps().size()) out.push_back(v);
    }
    return out;
}

ViscosityResidual viscosity_residual(const SemigroupFamily& family, const std::vector<GridFunction>& snapshots,
                                     double dt, const std::vector<unsigned char>& region) {
    if (snapshots.size() < 3) throw InvalidInput("viscosity residual needs at least three snapshots");
    if (!(dt > 0.0)) throw InvalidInput("snapshot spacing must be positive");
    const std::size_t n = family.grid()->size();
    if (!region.empty() && region.size() != n) throw InvalidInput("region mask does not match the grid");
    const std::size_t K = snapshots.size();
    ViscosityResidual r;
    for (std::size_t k = 0; k < K; ++k) {
        GridFunction dtu(family.grid());
        const auto& u = snapshots;
        for (std::size_t i = 0; i < n; ++i) {
            if (k == 0)
                dtu[i] = (-3.0 * u[0][i] + 4.0 * u[1][i] - u[2][i]) / (2.0 * dt);
            else if (k == K - 1)
                dtu[i] = (3.0 * u[K - 1][i] - 4.0 * u[K - 2][i] + u[K - 3][i]) / (2.0 * dt);
            else
                dtu[i] = (u[k + 1][i] - u[k - 1][i]) / (2.0 * dt);
        }
        std::vector<unsigned char> valid(n, 1);
        GridFunction ham(family.grid(), -std::numeric_limits<double>::infinity());
        for (const auto& m : family.members()) {
            const auto gen = m->generator(snapshots[k]);
            for (std::size_t i = 0; i < n; ++i) {
                valid[i] &= gen.valid[i];
                ham[i] = std::max(ham[i], gen.values[i]);
            }
        }
        GridFunction res(family.grid());
        for (std::size_t i = 0; i < n; ++i) {
            res[i] = valid[i] ? dtu[i] - ham[i] : 0.0;
            const bool inside = valid[i] && (region.empty() || region[i]);
            if (inside && k > 0 && k + 1 < K) r.max_interior_residual = std::max(r.max_interior_residual, std::abs(res[i]));
        }
        r.residual_field.push_back(std::move(res));
    }
    return r;
}

bool PropertyReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.pass || c.skipped; });
}

const PropertyCheck& PropertyReport::check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw InvalidInput("no property check named '" + name + "'");
}

nlohmann::ordered_json PropertyReport::to_json() const {
    nlohmann::ordered_json j;
    j["pass"] = pass();
    j["epsilon_q"] = eps_q.epsilon;
    j["epsilon_q_measured"] = eps_q.measured;
    auto& arr = j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["skipped"] = c.skipped;
        e["worst_slack"] = c.worst_slack;
        e["threshold"] = c.threshold;
        if (!c.note.empty()) e["note"] = c.note;
        arr.push_back(std::move(e));
    }
    return j;
}

namespace {

class CheckAccumulator {
public:
    CheckAccumulator(std::string name, double threshold) {
        c_.name = std::move(name);
        c_.threshold = threshold;
        c_.worst_slack = std::numeric_limits<double>::infinity();
    }
    void observe(double slack) { c_.worst_slack = std::min(c_.worst_slack, slack); }
    PropertyCheck finish() {
        if (std::isinf(c_.worst_slack)) return skipped(c_.name, "nothing to compare");
        c_.pass = c_.worst_slack >= -c_.threshold;
        return c_;
    }
    static PropertyCheck skipped(std::string name, std::string note) {
        PropertyCheck c;
        c.name = std::move(name);
        c.skipped = true;
        c.note = std::move(note);
        return c;
    }

private:
    PropertyCheck c_;
};

Partition random_subpartition(double t, unsigned level, const std::vector<unsigned>& ticks) {
    std::vector<double> times{0.0};
    const double denom = static_cast<double>(1u << level);
    for (unsigned k : ticks) times.push_back(t * static_cast<double>(k) / denom);
    times.push_back(t);
    return Partition(std::move(times));
}

}  // namespace

PropertyReport property_suite(const SemigroupFamily& family, const std::vector<GridFunction>& probes,
                              const std::vector<double>& t_list, SuiteOptions opt) {
    if (probes.empty()) throw InvalidInput("property suite needs at least one probe");
    if (t_list.empty()) throw InvalidInput("property suite needs at least one horizon");
    const auto& grid = family.grid();
    PropertyReport report;
    const unsigned depth = std::clamp(opt.refine.max_level, 3u, 8u);
    for (double t : t_list) {
        const auto q = quadrature_tolerance(family, t, depth, probes);
        if (q.epsilon >= report.eps_q.epsilon) report.eps_q = q;
    }
    const double eps = report.eps_q.epsilon;
    PropagatorCache cache(family);
    const GridFunction one(grid, 1.0);
    const GridFunction bump = index_bump(grid);

    const bool conservative = std::all_of(family.members().begin(), family.members().end(),
                                          [](const MemberPtr& m) { return m->conservative(); });
    const bool lipschitz_applicable =
        grid->dimension() == 1 && std::all_of(family.members().begin(), family.members().end(),
                                              [](const MemberPtr& m) { return m->translation_invariant(); });
    double beta = 0.0;
    for (const auto& m : family.members()) beta = std::max(beta, m->lipschitz_rate());

    CheckAccumulator constants("constants", 0.0), monotone("monotonicity", 0.0),
        sublinear("sublinearity", opt.sublinear_tolerance), homogeneous("homogeneity", 0.0),
        contraction("kappa_contraction", eps), lipschitz("lipschitz_propagation", eps),
        refinement("partition_refinement", eps), dyadic("dyadic_monotonicity", eps),
        dominance("envelope_dominance", eps), dpp("dpp", opt.dpp_tolerance);

    for (double h : t_list) {
        auto E = [&](const GridFunction& u) { return envelope_step(cache, h, u, nullptr); };
        const double growth = std::exp(measure_bounds(family, h).alpha * h);
        if (conservative) constants.observe(-max_abs_diff(E(one), one));
        std::vector<GridFunction> images;
        for (const auto& u : probes) images.push_back(E(u));
        for (std::size_t a = 0; a < probes.size(); ++a) {
            monotone.observe(min_pointwise(E(probes[a] + bump), images[a]));
            for (double c : {2.0, 0.25}) homogeneous.observe(-max_abs_diff(E(c * probes[a]), c * images[a]));
            if (lipschitz_applicable)
                lipschitz.observe(std::exp(beta * h) * lip_seminorm(probes[a]) - lip_seminorm(images[a]));
            for (std::size_t b = a; b < probes.size(); ++b) {
                const auto joint = E(probes[a] + probes[b]);
                double worst = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < joint.size(); ++i) {
                    const double scale = std::max(1.0, std::abs(images[a][i]) + std::abs(images[b][i]));
                    worst = std::min(worst, (images[a][i] + images[b][i] - joint[i]) / scale);
                }
                sublinear.observe(worst);
                if (b != a)
                    contraction.observe(growth * weighted_norm(probes[a] - probes[b]) -
                                        weighted_norm(images[a] - images[b]));
            }
        }
    }

    std::mt19937_64 rng(opt.seed);
    const unsigned ticks = (1u << opt.partition_level) - 1;
    for (double t : t_list) {
        for (const auto& u : probes) {
            const auto nv = nisio_value(cache, t, u, opt.refine);
            for (std::size_t n = 1; n < nv.levels.size(); ++n)
                dyadic.observe(min_weighted_slack(nv.levels[n], nv.levels[n - 1]));
            for (const auto& m : family.members()) dominance.observe(min_weighted_slack(nv.value, m->apply(t, u)));
            const auto half = nisio_value(cache, 0.5 * t, u, opt.refine).value;
            const auto split = nisio_value(cache, 0.5 * t, half, opt.refine).value;
            dpp.observe(-weighted_norm(nv.value - split));
        }
        for (unsigned pair = 0; pair < opt.partition_pairs; ++pair) {
            std::uniform_int_distribution<unsigned> tick(1, ticks);
            std::uniform_int_distribution<unsigned> count(0, 6);
            std::set<unsigned> coarse, fine;
            for (unsigned k = count(rng); k > 0; --k) coarse.insert(tick(rng));
            fine = coarse;
            for (unsigned k = 1 + count(rng); k > 0; --k) fine.insert(tick(rng));
            const auto p1 = random_subpartition(t, opt.partition_level, {coarse.begin(), coarse.end()});
            const auto p2 = random_subpartition(t, opt.partition_level, {fine.begin(), fine.end()});
            for (const auto& u : probes)
                refinement.observe(min_weighted_slack(partition_apply(cache, p2, u), partition_apply(cache, p1, u)));
        }
    }

    report.checks.push_back(conservative ? constants.finish()
                                         : CheckAccumulator::skipped("constants", "family is not conservative"));
    report.checks.push_back(monotone.finish());
    report.checks.push_back(sublinear.finish());
    report.checks.push_back(homogeneous.finish());
    report.checks.push_back(contraction.finish());
    report.checks.push_back(lipschitz_applicable
                                ? lipschitz.finish()
                                : CheckAccumulator::skipped("lipschitz_propagation",
                                                            "needs translation-invariant members on a 1D grid"));
    report.checks.push_back(refinement.finish());
    report.checks.push_back(dyadic.finish());
    report.checks.push_back(dominance.finish());
    report.checks.push_back(dpp.finish());
    return report;
}

}  // namespace nisio
