#pragma once

#include <cmath>
#include <functional>
#include <memory>

#include "nisio/grid.hpp"

namespace fixtures {

inline nisio::GridPtr line(double lo, double hi, double dx, double p = 0.0,
                           nisio::BoundaryPolicy b = nisio::BoundaryPolicy::MassRenormalize) {
    return std::make_shared<const nisio::WeightedGrid>(nisio::WeightedGrid::uniform(lo, hi, dx, {p}, b));
}

inline nisio::GridPtr circle(std::size_t n, double period = 2.0 * M_PI) {
    return std::make_shared<const nisio::WeightedGrid>(nisio::WeightedGrid::periodic(-0.5 * period, period, n));
}

inline nisio::GridPtr labels(std::size_t n) {
    return std::make_shared<const nisio::WeightedGrid>(nisio::WeightedGrid::labels(n));
}

inline nisio::GridFunction f(const nisio::GridPtr& g, const std::function<double(double)>& fn) {
    return nisio::GridFunction::sample(g, fn);
}

// max |u - oracle| over points with lo <= x <= hi
inline double max_err(const nisio::GridFunction& u, const std::function<double(double)>& oracle, double lo,
                      double hi) {
    double e = 0.0;
    const auto& g = *u.grid();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.x(i) >= lo && g.x(i) <= hi) e = std::max(e, std::abs(u[i] - oracle(g.x(i))));
    return e;
}

}  // namespace fixtures
