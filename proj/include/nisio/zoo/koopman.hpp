#pragma once

#include "nisio/semigroup.hpp"
#include "nisio/zoo/expression.hpp"

namespace nisio {

struct KoopmanSpec {
    std::string field = "0";     // F(x)
    double lipschitz_hint = 0.0;  // beta, an upper bound on Lip(F) over the domain
};

/// Koopman semigroup (S(t)u)(x) = u(Phi(t, x)) of the flow x' = F(x).
///
/// Flows are integrated with classical RK4 at step t / ceil(t / 0.01); u is
/// read at the flowed point by linear interpolation (constant outside the
/// domain, counted in RowOperator::flagged_rows).
class KoopmanMember final : public TransitionOperator {
public:
    KoopmanMember(GridPtr grid, KoopmanSpec spec);

    [[nodiscard]] std::string name() const override;
    [[nodiscard]] RowOperator propagator(double t) const override;
    /// u' F by central differences.
    [[nodiscard]] GeneratorResult generator(const GridFunction& u) const override;
    [[nodiscard]] double lipschitz_rate() const override { return spec_.lipschitz_hint; }
    [[nodiscard]] bool has_sampler() const override { return true; }
    [[nodiscard]] bool deterministic() const override { return true; }
    [[nodiscard]] TransitionSampler sampler(double h) const override;

    [[nodiscard]] double flow(double t, double x) const;
    [[nodiscard]] double field(double x) const { return field_(x); }
    [[nodiscard]] const KoopmanSpec& spec() const { return spec_; }

private:
    KoopmanSpec spec_;
    Expression field_;
};

}  // namespace nisio
