#include "nisio/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nisio/errors.hpp"

namespace nisio {

const std::vector<RowOperator>& PropagatorCache::at(double h) {
    auto it = cache_.find(h);
    if (it != cache_.end()) return it->second;
    std::vector<RowOperator> ops;
    ops.reserve(family_->size());
    for (const auto& m : family_->members()) ops.push_back(m->propagator(h));
    return cache_.emplace(h, std::move(ops)).first->second;
}

std::vector<const RowOperator*> PropagatorCache::pointers(double h) {
    const auto& ops = at(h);
    std::vector<const RowOperator*> p;
    p.reserve(ops.size());
    for (const auto& op : ops) p.push_back(&op);
    return p;
}

namespace {

void check_input(const SemigroupFamily& family, const GridFunction& u) {
    if (u.size() != family.grid()->size()) throw InvalidInput("grid function does not match family grid");
}

void check_duration(double h) {
    if (!(h >= 0.0) || !std::isfinite(h)) throw InvalidInput("duration must be finite and >= 0");
}

}  // namespace

GridFunction envelope_step(PropagatorCache& cache, double h, const GridFunction& u,
                           std::vector<std::int32_t>* argmax) {
    check_duration(h);
    if (h == 0.0) {
        if (argmax) argmax->assign(u.size(), 0);
        return u;
    }
    const auto members = cache.pointers(h);
    GridFunction out(u.grid());
    if (argmax) argmax->resize(u.size());
    kernels::envelope_max(members, u.values(), out.values(),
                          argmax ? std::span<std::int32_t>(*argmax) : std::span<std::int32_t>{});
    return out;
}

GridFunction envelope_step(const SemigroupFamily& family, double h, const GridFunction& u) {
    check_input(family, u);
    PropagatorCache cache(family);
    return envelope_step(cache, h, u, nullptr);
}

GridFunction partition_apply(PropagatorCache& cache, const Partition& pi, const GridFunction& u) {
    GridFunction v = u;
    const auto& gaps = pi.gaps();
    // right-to-left: the last gap acts first
    for (auto it = gaps.rbegin(); it != gaps.rend(); ++it) v = envelope_step(cache, *it, v, nullptr);
    return v;
}

GridFunction partition_apply(const SemigroupFamily& family, const Partition& pi, const GridFunction& u) {
    check_input(family, u);
    PropagatorCache cache(family);
    return partition_apply(cache, pi, u);
}

NisioResult nisio_value(PropagatorCache& cache, double t, const GridFunction& u, RefineOptions refine) {
    check_duration(t);
    if (!(refine.tol > 0.0)) throw InvalidInput("refinement tolerance must be positive");
    if (refine.max_level < 1) throw InvalidInput("max_level must be >= 1");
    if (refine.min_level > refine.max_level) throw InvalidInput("min_level exceeds max_level");
    NisioResult r;
    if (t == 0.0) {
        r.value = u;
        r.levels.push_back(u);
        r.converged = true;
        return r;
    }
    r.levels.push_back(partition_apply(cache, Partition::dyadic(t, 0), u));
    for (unsigned level = 1; level <= refine.max_level; ++level) {
        r.levels.push_back(partition_apply(cache, Partition::dyadic(t, level), u));
        const double inc = weighted_norm(r.levels[level] - r.levels[level - 1]);
        r.increments.push_back(inc);
        r.converged = inc <= refine.tol;
        if (r.converged && level >= refine.min_level) break;
    }
    r.value = r.levels.back();
    return r;
}

NisioResult nisio_value(const SemigroupFamily& family, double t, const GridFunction& u,
                        RefineOptions refine) {
    check_input(family, u);
    PropagatorCache cache(family);
    return nisio_value(cache, t, u, refine);
}

DppResult dpp_check(const SemigroupFamily& family, double s, double t, const GridFunction& u,
                    RefineOptions refine) {
    check_input(family, u);
    check_duration(s);
    check_duration(t);
    PropagatorCache cache(family);
    const auto whole = nisio_value(cache, s + t, u, refine).value;
    const auto inner = nisio_value(cache, t, u, refine).value;
    const auto split = nisio_value(cache, s, inner, refine).value;
    return {weighted_norm(whole - split)};
}

UpperBoundResult upper_bound_check(const SemigroupFamily& family, double t, const GridFunction& u,
                                   RefineOptions refine) {
    check_input(family, u);
    PropagatorCache cache(family);
    const auto env = nisio_value(cache, t, u, refine).value;
    UpperBoundResult r{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t m = 0; m < family.size(); ++m) {
        const double slack = min_weighted_slack(env, family[m]->apply(t, u));
        if (slack < r.min_slack) {
            r.min_slack = slack;
            r.worst_member = m;
        }
    }
    return r;
}

QuadratureTolerance quadrature_tolerance(const SemigroupFamily& family, double horizon, unsigned depth,
                                         const std::vector<GridFunction>& extra_probes) {
    check_duration(horizon);
    if (depth < 1 || depth > 16) throw InvalidInput("quadrature depth must lie in 1..16");
    QuadratureTolerance q;
    if (horizon > 0.0) {
        const auto& grid = family.grid();
        std::vector<GridFunction> probes{
            GridFunction(grid, 1.0),
            GridFunction::sample(grid, [](double x) { return x; }),
            GridFunction::sample(grid, [](double x) { return std::sin(x); }),
        };
        for (const auto& p : extra_probes) {
            check_input(family, p);
            probes.push_back(p);
        }
        for (const auto& m : family.members()) {
            const auto full = m->propagator(horizon);
            std::vector<GridFunction> direct;
            for (const auto& p : probes) {
                GridFunction d(grid);
                full.apply(p.values(), d.values());
                direct.push_back(std::move(d));
            }
            for (unsigned k = 1; k <= depth; ++k) {
                const std::size_t steps = std::size_t{1} << k;
                const auto step = m->propagator(horizon / static_cast<double>(steps));
                for (std::size_t i = 0; i < probes.size(); ++i) {
                    GridFunction v = probes[i], w(grid);
                    for (std::size_t j = 0; j < steps; ++j) {
                        step.apply(v.values(), w.values());
                        std::swap(v, w);
                    }
                    q.measured = std::max(q.measured, weighted_norm(v - direct[i]));
                }
            }
        }
    }
    q.epsilon = std::max(q.measured, kRoundoffFloor);
    return q;
}

}  // namespace nisio
