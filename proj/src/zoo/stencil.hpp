#pragma once

// Second-order finite-difference stencils shared by the generator
// implementations. Not part of the public interface.

#include <cstddef>
#include <vector>

#include "nisio/grid.hpp"
#include "nisio/semigroup.hpp"

namespace nisio::detail {

struct Derivatives1D {
    std::vector<double> d1;
    std::vector<double> d2;
    std::vector<unsigned char> valid;
};

/// Three-point first and second derivatives on a 1D grid (uniform,
/// log-symmetric or periodic). End points of non-periodic grids are invalid.
inline Derivatives1D derivatives_1d(const GridFunction& u) {
    const auto& g = *u.grid();
    const std::size_t n = g.size();
    Derivatives1D d{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                    std::vector<unsigned char>(n, 0)};
    const bool periodic = g.kind() == GridKind::Periodic;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t l, r;
        double hl, hr;
        if (periodic) {
            l = (i + n - 1) % n;
            r = (i + 1) % n;
            hl = hr = g.spacing();
        } else {
            if (i == 0 || i + 1 == n) continue;
            l = i - 1;
            r = i + 1;
            hl = g.x(i) - g.x(l);
            hr = g.x(r) - g.x(i);
        }
        const double ul = u[l], uc = u[i], ur = u[r];
        d.d1[i] = (hl * hl * (ur - uc) + hr * hr * (uc - ul)) / (hl * hr * (hl + hr));
        d.d2[i] = 2.0 * (hl * (ur - uc) - hr * (uc - ul)) / (hl * hr * (hl + hr));
        d.valid[i] = 1;
    }
    return d;
}

}  // namespace nisio::detail
