#pragma once

#include <array>
#include <vector>

#include "nisio/semigroup.hpp"

namespace nisio {

/// dX = (B X + m) dt + C^{1/2} dW in dimension d in {1, 2}; matrices row-major.
struct OUSpec {
    std::size_t dim = 1;
    std::vector<double> B;  // d x d
    std::vector<double> m;  // d
    std::vector<double> C;  // d x d, symmetric PSD
};

/// Mean and covariance of X_t started at x.
struct GaussianLaw {
    std::array<double, 2> mean{};
    std::array<double, 4> cov{};  // row-major 2x2 (only [0] used for d = 1)
};

/// Ornstein-Uhlenbeck semigroup by Gaussian quadrature on a uniform (d = 1)
/// or tensor (d = 2) grid.
class OUMember final : public TransitionOperator {
public:
    OUMember(GridPtr grid, OUSpec spec);

    [[nodiscard]] std::string name() const override;
    [[nodiscard]] RowOperator propagator(double t) const override;
    /// Du (Bx + m) + 1/2 tr(C D^2 u).
    [[nodiscard]] GeneratorResult generator(const GridFunction& u) const override;
    [[nodiscard]] double lipschitz_rate() const override;
    [[nodiscard]] bool has_sampler() const override { return true; }
    [[nodiscard]] TransitionSampler sampler(double h) const override;

    /// e^{tB} x + int_0^t e^{sB} m ds and int_0^t e^{sB} C e^{sB^T} ds.
    [[nodiscard]] GaussianLaw law(double t, const State& x) const;
    [[nodiscard]] const OUSpec& spec() const { return spec_; }

private:
    struct Moments {
        std::array<double, 4> expB{};   // e^{tB}
        std::array<double, 2> shift{};  // int e^{sB} m ds
        std::array<double, 4> cov{};
    };
    [[nodiscard]] Moments moments(double t) const;

    OUSpec spec_;
};

}  // namespace nisio
