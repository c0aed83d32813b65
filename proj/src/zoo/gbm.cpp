#include "nisio/zoo/gbm.hpp"

#include <cmath>
#include <sstream>

#include "nisio/errors.hpp"
#include "nisio/gaussian_kernel.hpp"
#include "stencil.hpp"

namespace nisio {

GBMMember::GBMMember(GridPtr grid, GBMSpec spec) : TransitionOperator(std::move(grid)), spec_(spec) {
    if (!(spec_.sigma >= 0.0) || !std::isfinite(spec_.sigma) || !std::isfinite(spec_.mu))
        throw ConfigError("gbm: need finite mu and sigma >= 0");
    if (this->grid()->kind() != GridKind::LogSymmetric) throw ConfigError("gbm: needs a log-symmetric grid");
}

std::string GBMMember::name() const {
    std::ostringstream os;
    os << "gbm(mu=" << spec_.mu << ",sigma=" << spec_.sigma << ")";
    return os.str();
}

double GBMMember::norm_rate() const { return std::abs(spec_.mu) + 0.5 * spec_.sigma * spec_.sigma; }

RowOperator GBMMember::propagator(double t) const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("duration must be finite and >= 0");
    const auto& g = *grid();
    const std::size_t n = g.size();
    if (t == 0.0) return RowOperator::identity(n);
    const std::size_t m = g.branch_size();
    const double dz = g.spacing();
    const double drift = (spec_.mu - 0.5 * spec_.sigma * spec_.sigma) * t / dz;
    const double variance = spec_.sigma * spec_.sigma * t / (dz * dz);
    const LatticeKernel k = gaussian_lattice_kernel(drift, variance);
    const auto mi = static_cast<std::ptrdiff_t>(m);
    const ColumnMap negative{mi - 1, -1};
    const ColumnMap positive{mi + 1, 1};

    RowOperator op(n);
    // rows in grid order: negative branch (z descending), zero, positive branch
    for (std::size_t i = 0; i < m; ++i) {
        const auto zi = mi - 1 - static_cast<std::ptrdiff_t>(i);
        push_kernel_row(op, k, zi, m, GridKind::Uniform, g.boundary(), negative);
    }
    op.push_row_unit(static_cast<std::uint32_t>(m));
    for (std::size_t k_idx = 0; k_idx < m; ++k_idx)
        push_kernel_row(op, k, static_cast<std::ptrdiff_t>(k_idx), m, GridKind::Uniform, g.boundary(),
                        positive);
    return op;
}

GeneratorResult GBMMember::generator(const GridFunction& u) const {
    auto d = detail::derivatives_1d(u);
    GeneratorResult r{GridFunction(u.grid()), std::move(d.valid)};
    const auto& g = *u.grid();
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!r.valid[i]) continue;
        const double x = g.x(i);
        r.values[i] = spec_.mu * x * d.d1[i] + 0.5 * spec_.sigma * spec_.sigma * x * x * d.d2[i];
    }
    return r;
}

TransitionSampler GBMMember::sampler(double h) const {
    const double drift = (spec_.mu - 0.5 * spec_.sigma * spec_.sigma) * h;
    const double sd = spec_.sigma * std::sqrt(h);
    return [drift, sd](const State& s, std::mt19937_64& rng) {
        std::normal_distribution<double> z;
        return State{s[0] * std::exp(drift + sd * z(rng)), 0.0};
    };
}

}  // namespace nisio
