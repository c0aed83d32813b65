#include "nisio/mc.hpp"

#include <cmath>
#include <limits>

#include "nisio/errors.hpp"
#include "nisio/probes.hpp"

namespace nisio {

namespace {

SafetyBox grid_box(const WeightedGrid& g) {
    if (g.kind() == GridKind::Tensor2D)
        return {{g.axis_x().x_min, g.axis_y().x_min}, {g.axis_x().x_max(), g.axis_y().x_max()}};
    return {{g.x(0), 0.0}, {g.x(g.size() - 1), 0.0}};
}

struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t flagged = 0;

    void push(double x) {
        n += 1.0;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        const double total = n + o.n;
        const double d = o.mean - mean;
        mean += d * (o.n / total);
        m2 += o.m2 + d * d * (n * o.n / total);
        n = total;
        flagged += o.flagged;
    }
};

}  // namespace

PathSimulator::PathSimulator(const SamplerSpec& spec) : spec_(&spec) {
    if (!spec.family) throw ConfigError("sampler spec has no family");
    const auto& family = *spec.family;
    spec.policy.validate(family.grid()->size(), family.size());
    for (const auto& m : family.members()) {
        if (!m->has_sampler()) throw ConfigError("member " + m->name() + " has no exact sampler");
        deterministic_ = deterministic_ && m->deterministic();
    }
    for (const auto& stage : spec.policy.stages) {
        std::vector<TransitionSampler> s;
        for (const auto& m : family.members()) s.push_back(m->sampler(stage.h));
        samplers_.push_back(std::move(s));
    }
    if (spec.box)
        box_ = spec.box;
    else if (family.grid()->kind() != GridKind::Labels)
        box_ = grid_box(*family.grid());
}

State PathSimulator::run(State x, std::mt19937_64& rng, bool& flagged) const {
    const auto& grid = *spec_->family->grid();
    const auto& stages = spec_->policy.stages;
    for (std::size_t k = 0; k < stages.size(); ++k) {
        const auto member = stages[k].selector[grid.nearest(x)];
        x = samplers_[k][static_cast<std::size_t>(member)](x, rng);
        if (box_) {
            for (int d = 0; d < 2; ++d) {
                if (x[d] < box_->lo[d]) {
                    x[d] = box_->lo[d];
                    flagged = true;
                } else if (x[d] > box_->hi[d]) {
                    x[d] = box_->hi[d];
                    flagged = true;
                }
            }
        }
    }
    return x;
}

State sample_controlled_path(const SamplerSpec& spec, const State& x0, std::mt19937_64& rng, bool* flagged) {
    PathSimulator sim(spec);
    bool f = false;
    const State x = sim.run(x0, rng, f);
    if (flagged) *flagged = f;
    return x;
}

McEstimate mc_value(const SamplerSpec& spec, const State& x0, const std::function<double(const State&)>& u) {
    if (spec.paths < 100) throw InvalidInput("monte carlo needs at least 100 paths");
    if (spec.chunk < 1) throw InvalidInput("monte carlo chunk size must be positive");
    const PathSimulator sim(spec);
    const std::size_t chunks = (spec.paths + spec.chunk - 1) / spec.chunk;
    std::vector<Moments> partial(chunks);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t c = 0; c < chunks; ++c) {
        std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                          static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
        std::mt19937_64 rng(seq);
        const std::size_t begin = c * spec.chunk;
        const std::size_t end = std::min(spec.paths, begin + spec.chunk);
        Moments m;
        for (std::size_t p = begin; p < end; ++p) {
            bool flagged = false;
            m.push(u(sim.run(x0, rng, flagged)));
            if (flagged) ++m.flagged;
        }
        partial[c] = m;
    }
    Moments total;
    for (const auto& m : partial) total.merge(m);
    McEstimate r;
    r.estimate = total.mean;
    r.paths = spec.paths;
    r.flagged = total.flagged;
    r.std_error = total.n > 1.0 ? std::sqrt(total.m2 / (total.n - 1.0) / total.n) : 0.0;
    return r;
}

nlohmann::ordered_json McComparison::to_json() const {
    nlohmann::ordered_json j;
    j["mc_estimate"] = mc.estimate;
    j["mc_std_error"] = mc.std_error;
    j["paths"] = mc.paths;
    j["paths_clamped"] = mc.flagged;
    j["grid_policy_value"] = grid;
    j["nisio_value"] = nisio;
    j["z_score"] = z_score;
    j["flagged"] = flagged;
    return j;
}

McComparison mc_compare(const SamplerSpec& spec, const GridFunction& u_grid,
                        const std::function<double(const State&)>& u, const State& x0, RefineOptions refine) {
    const auto& family = *spec.family;
    McComparison r;
    r.mc = mc_value(spec, x0, u);
    PropagatorCache cache(family);
    r.grid = evaluate(policy_value(cache, spec.policy, u_grid), x0);
    r.nisio = evaluate(nisio_value(cache, spec.policy.horizon(), u_grid, refine).value, x0);
    const double diff = r.grid - r.mc.estimate;
    if (r.mc.std_error > 0.0)
        r.z_score = diff / r.mc.std_error;
    else
        r.z_score = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    r.flagged = !(std::abs(r.z_score) <= 3.0);
    return r;
}

}  // namespace nisio
