#pragma once

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "nisio/grid.hpp"
#include "nisio/row_operator.hpp"

namespace nisio {

using TransitionSampler = std::function<State(const State&, std::mt19937_64&)>;

/// Generator applied to a grid function. Points where the stencil does not
/// fit are marked invalid and excluded from norms.
struct GeneratorResult {
    GridFunction values;
    std::vector<unsigned char> valid;

    [[nodiscard]] double weighted_norm() const;
};

/// Growth rates of the weighted sup norm (alpha) and the Lipschitz seminorm
/// (beta) per unit time. Only used in tolerance formulas.
struct FamilyBounds {
    double alpha = 0.0;
    double beta = 0.0;
};

/// One linear member semigroup S_lambda, discretized on a WeightedGrid.
///
/// propagator(t) is the row operator of S_lambda(t): nonnegative weights, unit
/// row sums (for conservative members), propagator(0) the identity.
class TransitionOperator {
public:
    explicit TransitionOperator(GridPtr grid) : grid_(std::move(grid)) {}
    virtual ~TransitionOperator() = default;

    [[nodiscard]] const GridPtr& grid() const { return grid_; }
    [[nodiscard]] virtual std::string name() const = 0;

    [[nodiscard]] virtual RowOperator propagator(double t) const = 0;
    [[nodiscard]] virtual GeneratorResult generator(const GridFunction& u) const = 0;

    /// Lipschitz growth rate used by the Lipschitz-propagation property.
    [[nodiscard]] virtual double lipschitz_rate() const { return 0.0; }
    /// Kernel depends only on y - x (away from the boundary).
    [[nodiscard]] virtual bool translation_invariant() const { return false; }
    [[nodiscard]] virtual bool conservative() const { return true; }

    /// Exact transition sampler for duration h; only valid when has_sampler().
    [[nodiscard]] virtual bool has_sampler() const { return false; }
    [[nodiscard]] virtual TransitionSampler sampler(double h) const;
    /// Deterministic members have zero sampling variance.
    [[nodiscard]] virtual bool deterministic() const { return false; }

    [[nodiscard]] GridFunction apply(double t, const GridFunction& u) const;

private:
    GridPtr grid_;
};

using MemberPtr = std::shared_ptr<const TransitionOperator>;

/// Nonempty finite family sharing one grid.
class SemigroupFamily {
public:
    SemigroupFamily(std::vector<MemberPtr> members, FamilyBounds bounds = {});

    [[nodiscard]] const std::vector<MemberPtr>& members() const { return members_; }
    [[nodiscard]] std::size_t size() const { return members_.size(); }
    [[nodiscard]] const MemberPtr& operator[](std::size_t i) const { return members_[i]; }
    [[nodiscard]] const GridPtr& grid() const { return members_.front()->grid(); }
    [[nodiscard]] const FamilyBounds& bounds() const { return bounds_; }
    void set_bounds(FamilyBounds b) { bounds_ = b; }

private:
    std::vector<MemberPtr> members_;
    FamilyBounds bounds_;
};

/// Bounds for a family at step h: alpha from the exact weighted operator norm
/// of the discretized members, beta from the members' Lipschitz rates.
FamilyBounds measure_bounds(const SemigroupFamily& family, double h);

}  // namespace nisio
