#pragma once

#include "nisio/semigroup.hpp"

namespace nisio {

struct HeatSpec {
    double sigma = 1.0;
};

/// Heat semigroup with volatility sigma: Gaussian convolution with variance
/// sigma^2 t on a uniform or periodic grid.
///
/// The lattice kernel reproduces the variance exactly; below sigma^2 t <
/// dx^2/100 it switches to the three-point identity-plus-stencil step.
class HeatMember final : public TransitionOperator {
public:
    HeatMember(GridPtr grid, HeatSpec spec);

    [[nodiscard]] std::string name() const override;
    [[nodiscard]] RowOperator propagator(double t) const override;
    /// sigma^2/2 u''.
    [[nodiscard]] GeneratorResult generator(const GridFunction& u) const override;
    [[nodiscard]] bool translation_invariant() const override { return true; }
    [[nodiscard]] bool has_sampler() const override { return true; }
    [[nodiscard]] TransitionSampler sampler(double h) const override;

    [[nodiscard]] const HeatSpec& spec() const { return spec_; }

private:
    HeatSpec spec_;
};

}  // namespace nisio
