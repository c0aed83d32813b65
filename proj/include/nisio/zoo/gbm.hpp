#pragma once

#include "nisio/semigroup.hpp"

namespace nisio {

struct GBMSpec {
    double mu = 0.0;
    double sigma = 0.0;
};

/// Geometric Brownian motion (S(t)u)(x) = E u(x X_t) with
/// X_t = exp(t(mu - sigma^2/2) + sigma W_t).
///
/// Lives on a log-symmetric grid: multiplication by X_t is a translation in
/// z = log|x|, so each branch is a lattice Gaussian quadrature in z and no
/// interpolation is needed. x = 0 is a fixed point.
class GBMMember final : public TransitionOperator {
public:
    GBMMember(GridPtr grid, GBMSpec spec);

    [[nodiscard]] std::string name() const override;
    [[nodiscard]] RowOperator propagator(double t) const override;
    /// mu x u' + sigma^2 x^2 / 2 u''.
    [[nodiscard]] GeneratorResult generator(const GridFunction& u) const override;
    [[nodiscard]] double lipschitz_rate() const override { return spec_.mu > 0.0 ? spec_.mu : 0.0; }
    /// beta = |mu| + sigma^2/2, the per-unit-time growth exponent of E|X_t|^p^(1/p).
    [[nodiscard]] double norm_rate() const;
    [[nodiscard]] bool has_sampler() const override { return true; }
    [[nodiscard]] TransitionSampler sampler(double h) const override;

    [[nodiscard]] const GBMSpec& spec() const { return spec_; }

private:
    GBMSpec spec_;
};

}  // namespace nisio
