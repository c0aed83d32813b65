#pragma once

#include "nisio/semigroup.hpp"

namespace nisio {

struct StableLevySpec {
    double alpha = 0.5;  // A = -(-Laplacian)^alpha, 0 < alpha < 1
};

/// Symmetric 2alpha-stable semigroup on a periodic grid: Fourier multiplier
/// exp(-t |xi|^{2 alpha}).
///
/// The convolution kernel is the inverse FFT of the multiplier. Negative
/// lobes from the truncated spectrum are clipped and the kernel renormalized,
/// so the operator stays exactly monotone; a clipped kernel flags every row.
class StableMember final : public TransitionOperator {
public:
    StableMember(GridPtr grid, StableLevySpec spec);

    [[nodiscard]] std::string name() const override;
    [[nodiscard]] RowOperator propagator(double t) const override;
    /// Multiplier -|xi|^{2 alpha}, all points valid.
    [[nodiscard]] GeneratorResult generator(const GridFunction& u) const override;
    [[nodiscard]] bool translation_invariant() const override { return true; }

    /// Periodic convolution kernel K_j, j = 0..n-1, before clipping.
    [[nodiscard]] std::vector<double> raw_kernel(double t) const;
    [[nodiscard]] const StableLevySpec& spec() const { return spec_; }

private:
    [[nodiscard]] double frequency(std::size_t k) const;

    StableLevySpec spec_;
};

}  // namespace nisio
