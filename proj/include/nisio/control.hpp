#pragma once

#include <json.hpp>

#include <cstdint>
#include <vector>

#include "nisio/envelope.hpp"

namespace nisio {

/// One stage of a space-time-discrete control: run member selector[i] from
/// grid point i for duration h.
struct PolicyStage {
    double h = 0.0;
    std::vector<std::int32_t> selector;
};

/// stages[0] acts first in time, so it is applied last in the composition.
struct ControlPolicy {
    std::vector<PolicyStage> stages;

    [[nodiscard]] double horizon() const;
    /// Throws ConfigError on nonpositive durations, wrong selector sizes or
    /// member indices outside [0, members).
    void validate(std::size_t grid_size, std::size_t members) const;

    [[nodiscard]] nlohmann::ordered_json to_json() const;
    static ControlPolicy from_json(const nlohmann::json& j);
};

/// J u = S_{sel_1}(h_1) ... S_{sel_m}(h_m) u with per-point member choice.
GridFunction policy_value(const SemigroupFamily& family, const ControlPolicy& policy, const GridFunction& u);
GridFunction policy_value(PropagatorCache& cache, const ControlPolicy& policy, const GridFunction& u);

struct GreedyResult {
    ControlPolicy policy;
    GridFunction value;
};

/// Backward pass over m equal stages recording the lowest maximizing member;
/// value is the forward policy_value, equal to partition_apply on the
/// uniform m-partition.
GreedyResult greedy_policy(const SemigroupFamily& family, double t, const GridFunction& u, unsigned m);
GreedyResult greedy_policy(PropagatorCache& cache, double t, const GridFunction& u, unsigned m);

/// Uniformly random selectors over m equal stages.
ControlPolicy random_policy(const SemigroupFamily& family, double t, unsigned m, std::uint64_t seed);

struct DualityGap {
    /// ||nisio_value(t,u) - greedy value||_kappa.
    double gap = 0.0;
    /// min over points of kappa (nisio - greedy); negative means greedy exceeds the envelope.
    double min_slack = 0.0;
};

DualityGap duality_gap(const SemigroupFamily& family, double t, const GridFunction& u, RefineOptions refine,
                       unsigned m);

}  // namespace nisio
