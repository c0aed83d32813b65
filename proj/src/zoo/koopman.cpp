#include "nisio/zoo/koopman.hpp"

#include <cmath>
#include <sstream>

#include "nisio/errors.hpp"
#include "nisio/gaussian_kernel.hpp"
#include "stencil.hpp"

namespace nisio {

KoopmanMember::KoopmanMember(GridPtr grid, KoopmanSpec spec)
    : TransitionOperator(std::move(grid)), spec_(std::move(spec)), field_(spec_.field) {
    const auto& g = *this->grid();
    if (g.dimension() != 1) throw ConfigError("koopman: needs a one-dimensional grid");
    if (!(spec_.lipschitz_hint >= 0.0)) throw ConfigError("koopman: lipschitz_hint must be >= 0");
    double lip = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(field_(g.x(i)))) throw ConfigError("koopman: F is not finite on the grid");
        if (i > 0) lip = std::max(lip, std::abs(field_(g.x(i)) - field_(g.x(i - 1))) / (g.x(i) - g.x(i - 1)));
    }
    if (lip > spec_.lipschitz_hint * (1.0 + 1e-6) + 1e-12) {
        std::ostringstream os;
        os << "koopman: F has Lipschitz constant " << lip << " above the hint " << spec_.lipschitz_hint;
        throw ConfigError(os.str());
    }
}

std::string KoopmanMember::name() const { return "koopman(F=" + spec_.field + ")"; }

double KoopmanMember::flow(double t, double x) const {
    if (t == 0.0) return x;
    const auto steps = static_cast<long>(std::ceil(t / 0.01));
    const double h = t / static_cast<double>(steps);
    for (long k = 0; k < steps; ++k) {
        const double k1 = field_(x);
        const double k2 = field_(x + 0.5 * h * k1);
        const double k3 = field_(x + 0.5 * h * k2);
        const double k4 = field_(x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

RowOperator KoopmanMember::propagator(double t) const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("duration must be finite and >= 0");
    const auto& g = *grid();
    if (t == 0.0) return RowOperator::identity(g.size());
    RowOperator op(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) push_interpolation_row(op, g, flow(t, g.x(i)));
    return op;
}

GeneratorResult KoopmanMember::generator(const GridFunction& u) const {
    auto d = detail::derivatives_1d(u);
    GeneratorResult r{GridFunction(u.grid()), std::move(d.valid)};
    const auto& g = *u.grid();
    for (std::size_t i = 0; i < u.size(); ++i)
        if (r.valid[i]) r.values[i] = d.d1[i] * field_(g.x(i));
    return r;
}

TransitionSampler KoopmanMember::sampler(double h) const {
    return [this, h](const State& s, std::mt19937_64&) { return State{flow(h, s[0]), 0.0}; };
}

}  // namespace nisio
