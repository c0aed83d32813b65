#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "nisio/envelope.hpp"
#include "nisio/probes.hpp"

namespace nisio {

struct StrongContinuity {
    std::vector<double> h;
    /// r(h) = max over members of ||S_lambda(h)u - u||_kappa.
    std::vector<double> rates;
    /// Least-squares slope of r(h) ~ L h through the origin on the smallest three h.
    double slope = 0.0;
    /// ||r - L h|| / ||r|| on the fitted points (0 when r vanishes there).
    double relative_residual = 0.0;
    /// log2-type order between consecutive h, one entry per pair.
    std::vector<double> orders;
};

/// h_list must be positive and strictly decreasing with at least three entries.
StrongContinuity strong_continuity_probe(const SemigroupFamily& family, const GridFunction& u,
                                         const std::vector<double>& h_list);

struct CutoffDecay {
    std::vector<double> h;
    /// max over x of kappa(x) (S(h) phi_x)(x); h = 0 gives 0.
    std::vector<double> values;
    /// L e^{alpha h0} h, with L the largest generator bound on the cut-offs.
    std::vector<double> slope_bound;
    double generator_bound = 0.0;
    bool monotone = false;
    bool within_bound = false;
};

/// Cut-off phi_x(y) = 1 - bump(|y - x| / delta) on continuous grids and the
/// indicator of y != x on label grids. Throws InvalidInput when delta < 2 dx.
CutoffDecay cutoff_decay_probe(const SemigroupFamily& family, double delta,
                               const std::vector<double>& x_list, std::vector<double> h_list,
                               RefineOptions refine = {}, double eps_q = kRoundoffFloor);

/// Envelope iterates E_h^j u, h = horizon / 2^level, kept every `every` steps
/// (including j = 0 and the last step).
std::vector<GridFunction> envelope_snapshots(const SemigroupFamily& family, const GridFunction& u,
                                             double horizon, unsigned level, unsigned every);

struct ViscosityResidual {
    /// d_t u - max_lambda A_lambda u at every snapshot; ends use one-sided differences.
    std::vector<GridFunction> residual_field;
    /// Max |residual| over interior snapshots and points inside the region
    /// where every member's stencil is valid.
    double max_interior_residual = 0.0;
};

/// region, when nonempty, restricts the interior further (one flag per point).
ViscosityResidual viscosity_residual(const SemigroupFamily& family,
                                     const std::vector<GridFunction>& snapshots, double dt,
                                     const std::vector<unsigned char>& region = {});

struct SuiteOptions {
    RefineOptions refine = fixed_level(6);
    /// Random nested partition pairs for the refinement check.
    unsigned partition_pairs = 20;
    /// Nested partitions draw their points from {k t / 2^partition_level}.
    unsigned partition_level = 6;
    std::uint64_t seed = 1;
    double dpp_tolerance = 5e-3;
    double sublinear_tolerance = 1e-12;
};

struct PropertyCheck {
    std::string name;
    /// Smallest observed slack; the check passes when it is >= -threshold.
    double worst_slack = 0.0;
    double threshold = 0.0;
    bool pass = false;
    bool skipped = false;
    std::string note;
};

struct PropertyReport {
    QuadratureTolerance eps_q;
    std::vector<PropertyCheck> checks;

    [[nodiscard]] bool pass() const;
    [[nodiscard]] const PropertyCheck& check(const std::string& name) const;
    [[nodiscard]] nlohmann::ordered_json to_json() const;
};

/// Every envelope invariant over the probes and horizons, each compared
/// against eps_q measured at the largest horizon.
PropertyReport property_suite(const SemigroupFamily& family, const std::vector<GridFunction>& probes,
                              const std::vector<double>& t_list, SuiteOptions options = {});

}  // namespace nisio
