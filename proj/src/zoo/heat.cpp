#include "nisio/zoo/heat.hpp"

#include <cmath>
#include <sstream>

#include "nisio/errors.hpp"
#include "nisio/gaussian_kernel.hpp"
#include "stencil.hpp"

namespace nisio {

HeatMember::HeatMember(GridPtr grid, HeatSpec spec) : TransitionOperator(std::move(grid)), spec_(spec) {
    if (!(spec_.sigma >= 0.0) || !std::isfinite(spec_.sigma)) throw ConfigError("heat: sigma must be >= 0");
    const auto k = this->grid()->kind();
    if (k != GridKind::Uniform && k != GridKind::Periodic)
        throw ConfigError("heat: needs a uniform or periodic grid");
}

std::string HeatMember::name() const {
    std::ostringstream os;
    os << "heat(sigma=" << spec_.sigma << ")";
    return os.str();
}

RowOperator HeatMember::propagator(double t) const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("duration must be finite and >= 0");
    const auto& g = *grid();
    const std::size_t n = g.size();
    const double dx = g.spacing();
    const double variance = spec_.sigma * spec_.sigma * t / (dx * dx);
    if (variance == 0.0) return RowOperator::identity(n);
    const LatticeKernel k = gaussian_lattice_kernel(0.0, variance);
    RowOperator op(n);
    for (std::size_t i = 0; i < n; ++i)
        push_kernel_row(op, k, static_cast<std::ptrdiff_t>(i), n, g.kind(), g.boundary());
    return op;
}

GeneratorResult HeatMember::generator(const GridFunction& u) const {
    auto d = detail::derivatives_1d(u);
    GeneratorResult r{GridFunction(u.grid()), std::move(d.valid)};
    const double c = 0.5 * spec_.sigma * spec_.sigma;
    for (std::size_t i = 0; i < u.size(); ++i) r.values[i] = r.valid[i] ? c * d.d2[i] : 0.0;
    return r;
}

TransitionSampler HeatMember::sampler(double h) const {
    const double sd = spec_.sigma * std::sqrt(h);
    return [sd](const State& s, std::mt19937_64& rng) {
        std::normal_distribution<double> z;
        return State{s[0] + sd * z(rng), 0.0};
    };
}

}  // namespace nisio
