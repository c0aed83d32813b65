#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "nisio/grid.hpp"
#include "nisio/partition.hpp"
#include "nisio/semigroup.hpp"

namespace nisio {

/// Discretized member operators of a family, built once per step length.
class PropagatorCache {
public:
    explicit PropagatorCache(const SemigroupFamily& family) : family_(&family) {}

    /// Row operators S_lambda(h) for every member, in member order.
    const std::vector<RowOperator>& at(double h);
    /// Pointers into at(h), the form the kernels take.
    std::vector<const RowOperator*> pointers(double h);

private:
    const SemigroupFamily* family_;
    std::map<double, std::vector<RowOperator>> cache_;
};

/// One-step envelope E_h u = max over members of S_lambda(h) u.
GridFunction envelope_step(const SemigroupFamily& family, double h, const GridFunction& u);
/// Same, reusing cached propagators and reporting the lowest maximizing member.
GridFunction envelope_step(PropagatorCache& cache, double h, const GridFunction& u,
                           std::vector<std::int32_t>* argmax);

/// E_pi u = E_{t_1 - t_0} ... E_{t_m - t_{m-1}} u.
GridFunction partition_apply(const SemigroupFamily& family, const Partition& pi, const GridFunction& u);
GridFunction partition_apply(PropagatorCache& cache, const Partition& pi, const GridFunction& u);

struct RefineOptions {
    unsigned max_level = 12;
    double tol = 1e-6;
    /// Keep refining up to this level even after the increment test passes.
    unsigned min_level = 0;
};

inline RefineOptions fixed_level(unsigned level) { return {level, 1e-6, level}; }

struct NisioResult {
    GridFunction value;
    /// levels[n] = E_pi u for the dyadic partition with 2^n steps.
    std::vector<GridFunction> levels;
    /// increments[n] = ||levels[n+1] - levels[n]||_kappa.
    std::vector<double> increments;
    bool converged = false;
};

/// Dyadically refined envelope value S(t)u, refined until successive levels
/// differ by at most tol in the weighted norm or max_level is reached.
NisioResult nisio_value(const SemigroupFamily& family, double t, const GridFunction& u,
                        RefineOptions refine = {});
NisioResult nisio_value(PropagatorCache& cache, double t, const GridFunction& u, RefineOptions refine);

struct DppResult {
    double defect = 0.0;
};

/// ||S(s+t)u - S(s)S(t)u||_kappa, each side computed by nisio_value.
DppResult dpp_check(const SemigroupFamily& family, double s, double t, const GridFunction& u,
                    RefineOptions refine = {});

struct UpperBoundResult {
    /// min over members and points of kappa(x) (S(t)u - S_lambda(t)u)(x).
    double min_slack = 0.0;
    std::size_t worst_member = 0;
};

UpperBoundResult upper_bound_check(const SemigroupFamily& family, double t, const GridFunction& u,
                                   RefineOptions refine = {});

/// Composition defect of the discretized members.
struct QuadratureTolerance {
    /// max over members, probes and k = 1..depth of
    /// ||S(t/2^k)^{2^k} p - S(t) p||_kappa; k = 1 is the two-step pair.
    double measured = 0.0;
    /// max(measured, roundoff floor); the value every property test uses.
    double epsilon = 0.0;
};

inline constexpr double kRoundoffFloor = 1e-12;

/// Probes are {1, x, sin} plus extra_probes.
QuadratureTolerance quadrature_tolerance(const SemigroupFamily& family, double horizon, unsigned depth = 3,
                                         const std::vector<GridFunction>& extra_probes = {});

}  // namespace nisio
