#pragma once

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>

#include "nisio/control.hpp"

namespace nisio {

/// Axis-aligned box; states leaving it are clamped back and the path flagged.
struct SafetyBox {
    State lo{};
    State hi{};
};

struct SamplerSpec {
    const SemigroupFamily* family = nullptr;
    ControlPolicy policy;
    std::size_t paths = 100000;
    std::uint64_t seed = 0;
    /// Defaults to the grid's bounding box (no box on label grids).
    std::optional<SafetyBox> box;
    /// Paths per independent random stream; fixes the reduction order.
    std::size_t chunk = 4096;
};

/// Per-stage samplers, one per member, prepared once per simulation.
class PathSimulator {
public:
    explicit PathSimulator(const SamplerSpec& spec);

    /// Runs the policy forward from x0; flagged is set when the box clamps.
    State run(State x0, std::mt19937_64& rng, bool& flagged) const;
    [[nodiscard]] bool deterministic() const { return deterministic_; }

private:
    const SamplerSpec* spec_;
    std::vector<std::vector<TransitionSampler>> samplers_;
    std::optional<SafetyBox> box_;
    bool deterministic_ = true;
};

/// Single path; builds the samplers on every call, so prefer mc_value in loops.
State sample_controlled_path(const SamplerSpec& spec, const State& x0, std::mt19937_64& rng,
                             bool* flagged = nullptr);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t paths = 0;
    std::size_t flagged = 0;
};

/// Mean and standard error of u(X_t) over spec.paths paths. Streams are
/// seeded per chunk from (seed, chunk index), so the result does not depend
/// on the thread count.
McEstimate mc_value(const SamplerSpec& spec, const State& x0, const std::function<double(const State&)>& u);

struct McComparison {
    McEstimate mc;
    double grid = 0.0;   // policy_value at x0
    double nisio = 0.0;  // nisio_value at x0
    double z_score = 0.0;
    bool flagged = false;

    [[nodiscard]] nlohmann::ordered_json to_json() const;
};

/// z = (grid - mc) / SE, flagged when |z| > 3; z = 0 when SE = 0 and the values agree.
McComparison mc_compare(const SamplerSpec& spec, const GridFunction& u_grid,
                        const std::function<double(const State&)>& u, const State& x0,
                        RefineOptions refine = {});

}  // namespace nisio
