#pragma once

#include <functional>
#include <string>

#include "nisio/grid.hpp"

namespace nisio {

/// Named test functions: const, linear, quadratic, neg-quadratic, sin, cos,
/// bump, call (payoff max(x - strike, 0)), csv (tabulated samples).
struct ProbeSpec {
    std::string kind = "quadratic";
    double value = 1.0;      // const
    double strike = 0.0;     // call
    double center = 0.0;     // bump
    double width = 1.0;      // bump
    double frequency = 1.0;  // sin, cos
    std::string csv_path;    // csv
};

/// Smooth bump exp(1 - 1/(1 - r^2)) on |r| < 1, zero outside; equals 1 at r = 0.
double smooth_bump(double r);

/// Pointwise formula of a probe; 2D states use |x|^2 for the quadratics and
/// the first coordinate otherwise. Throws ConfigError for csv or unknown kinds.
std::function<double(const State&)> probe_function(const ProbeSpec& spec);

/// Probe sampled on the grid; csv probes must list one row "x,u" per grid point.
GridFunction make_probe(const GridPtr& grid, const ProbeSpec& spec);

/// Linear interpolation on 1D grids, nearest point otherwise.
double evaluate(const GridFunction& u, const State& s);

}  // namespace nisio
