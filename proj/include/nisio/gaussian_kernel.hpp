#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nisio/grid.hpp"
#include "nisio/row_operator.hpp"

namespace nisio {

/// Discrete transition kernel on the integer lattice: P(offset = first + k) = weights[k].
struct LatticeKernel {
    std::ptrdiff_t first = 0;
    std::vector<double> weights;

    [[nodiscard]] double mean() const;
    [[nodiscard]] double variance() const;
};

/// Which construction a lattice kernel came from.
enum class KernelRegime {
    Identity,       // zero variance, on-lattice mean
    Interpolation,  // two-point linear interpolation of the mean
    Stencil,        // three-point moment-matched stencil (variance below 1/100 cell^2)
    Matched,        // sampled Gaussian with parameters tuned to the exact mean/variance
    Sampled         // plain sampled Gaussian (variance >= 4 cell^2)
};

/// Nonnegative lattice kernel whose mean is `mean` and variance `variance`
/// (both in cell units), truncated at 12 standard deviations.
///
/// Below the smallest variance a lattice law with that mean can have, the
/// kernel is the linear interpolation of the mean (variance is then exceeded).
LatticeKernel gaussian_lattice_kernel(double mean, double variance, KernelRegime* regime = nullptr);

/// Maps an axis index j to the grid column offset + stride * j.
struct ColumnMap {
    std::ptrdiff_t offset = 0;
    std::ptrdiff_t stride = 1;

    [[nodiscard]] std::uint32_t operator()(std::ptrdiff_t j) const {
        return static_cast<std::uint32_t>(offset + stride * j);
    }
};

/// Places a lattice kernel at base index `center` of an axis with n points and
/// appends the resulting row, truncating (mass-renormalize), folding (reflect)
/// or wrapping (periodic) the out-of-range mass.
void push_kernel_row(RowOperator& op, const LatticeKernel& k, std::ptrdiff_t center, std::size_t n,
                     GridKind kind, BoundaryPolicy boundary, ColumnMap map = {});

/// Index of an out-of-range axis position after folding (reflect), wrapping
/// (periodic) or -1 when the mass is dropped.
std::ptrdiff_t fold_index(std::ptrdiff_t j, std::size_t n, GridKind kind, BoundaryPolicy boundary);

/// Row for an arbitrary (possibly non-lattice) 1D target by linear
/// interpolation on the grid, constant extrapolation outside. Returns true if
/// the target was extrapolated.
bool push_interpolation_row(RowOperator& op, const WeightedGrid& grid, double x);

}  // namespace nisio
