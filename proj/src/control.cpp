#include "nisio/control.hpp"

#include <random>

#include "nisio/errors.hpp"

namespace nisio {

double ControlPolicy::horizon() const {
    double t = 0.0;
    for (const auto& s : stages) t += s.h;
    return t;
}

void ControlPolicy::validate(std::size_t grid_size, std::size_t members) const {
    if (stages.empty()) throw ConfigError("policy has no stages");
    for (const auto& s : stages) {
        if (!(s.h > 0.0) || !std::isfinite(s.h)) throw ConfigError("policy stage durations must be positive");
        if (s.selector.size() != grid_size) throw ConfigError("policy selector does not match the grid");
        for (auto k : s.selector)
            if (k < 0 || static_cast<std::size_t>(k) >= members)
                throw ConfigError("policy selects member " + std::to_string(k) + " of " + std::to_string(members));
    }
}

nlohmann::ordered_json ControlPolicy::to_json() const {
    nlohmann::ordered_json j;
    j["horizon"] = horizon();
    auto& arr = j["stages"] = nlohmann::ordered_json::array();
    for (const auto& s : stages) arr.push_back({{"h", s.h}, {"selector", s.selector}});
    return j;
}

ControlPolicy ControlPolicy::from_json(const nlohmann::json& j) {
    ControlPolicy p;
    try {
        for (const auto& s : j.at("stages")) {
            PolicyStage st;
            st.h = s.at("h").get<double>();
            st.selector = s.at("selector").get<std::vector<std::int32_t>>();
            p.stages.push_back(std::move(st));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed policy: ") + e.what());
    }
    return p;
}

GridFunction policy_value(PropagatorCache& cache, const ControlPolicy& policy, const GridFunction& u) {
    GridFunction v = u;
    GridFunction next(u.grid());
    for (auto it = policy.stages.rbegin(); it != policy.stages.rend(); ++it) {
        const auto ops = cache.pointers(it->h);
        kernels::select_apply(ops, it->selector, v.values(), next.values());
        std::swap(v, next);
    }
    return v;
}

GridFunction policy_value(const SemigroupFamily& family, const ControlPolicy& policy, const GridFunction& u) {
    if (u.size() != family.grid()->size()) throw InvalidInput("grid function does not match family grid");
    policy.validate(u.size(), family.size());
    PropagatorCache cache(family);
    return policy_value(cache, policy, u);
}

GreedyResult greedy_policy(PropagatorCache& cache, double t, const GridFunction& u, unsigned m) {
    if (m == 0) throw InvalidInput("greedy policy needs at least one stage");
    if (!(t > 0.0)) throw InvalidInput("greedy policy needs a positive horizon");
    const auto pi = Partition::uniform(t, m);
    GreedyResult r;
    r.policy.stages.resize(m);
    GridFunction v = u;
    for (std::size_t k = m; k-- > 0;) {
        auto& stage = r.policy.stages[k];
        stage.h = pi.gaps()[k];
        v = envelope_step(cache, stage.h, v, &stage.selector);
    }
    r.value = policy_value(cache, r.policy, u);
    return r;
}

GreedyResult greedy_policy(const SemigroupFamily& family, double t, const GridFunction& u, unsigned m) {
    if (u.size() != family.grid()->size()) throw InvalidInput("grid function does not match family grid");
    PropagatorCache cache(family);
    return greedy_policy(cache, t, u, m);
}

ControlPolicy random_policy(const SemigroupFamily& family, double t, unsigned m, std::uint64_t seed) {
    if (m == 0) throw InvalidInput("random policy needs at least one stage");
    const auto pi = Partition::uniform(t, m);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int32_t> pick(0, static_cast<std::int32_t>(family.size()) - 1);
    ControlPolicy p;
    for (unsigned k = 0; k < m; ++k) {
        PolicyStage s{pi.gaps()[k], std::vector<std::int32_t>(family.grid()->size())};
        for (auto& x : s.selector) x = pick(rng);
        p.stages.push_back(std::move(s));
    }
    return p;
}

DualityGap duality_gap(const SemigroupFamily& family, double t, const GridFunction& u, RefineOptions refine,
                       unsigned m) {
    PropagatorCache cache(family);
    const auto nisio = nisio_value(cache, t, u, refine).value;
    const auto greedy = greedy_policy(cache, t, u, m).value;
    return {weighted_norm(nisio - greedy), min_weighted_slack(nisio, greedy)};
}

}  // namespace nisio
