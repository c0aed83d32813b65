#include "nisio/zoo/stable.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>

#include "nisio/errors.hpp"

namespace nisio {

namespace {

// FFTW planning is not thread-safe.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

// Real inverse DFT of a Hermitian spectrum of length n/2+1 (unnormalized).
std::vector<double> inverse_real_dft(std::vector<std::complex<double>> spectrum, std::size_t n) {
    std::vector<double> out(n);
    fftw_plan plan;
    {
        std::lock_guard lock(plan_mutex());
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(spectrum.data()),
                                    out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

std::vector<std::complex<double>> forward_real_dft(std::vector<double> in) {
    const std::size_t n = in.size();
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(plan_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace

StableMember::StableMember(GridPtr grid, StableLevySpec spec) : TransitionOperator(std::move(grid)), spec_(spec) {
    if (!(spec_.alpha > 0.0 && spec_.alpha < 1.0)) throw ConfigError("stable: alpha must lie in (0, 1)");
    if (this->grid()->kind() != GridKind::Periodic) throw ConfigError("stable: needs a uniform periodic grid");
}

std::string StableMember::name() const {
    std::ostringstream os;
    os << "stable(alpha=" << spec_.alpha << ")";
    return os.str();
}

double StableMember::frequency(std::size_t k) const {
    return 2.0 * std::numbers::pi * static_cast<double>(k) / grid()->period();
}

std::vector<double> StableMember::raw_kernel(double t) const {
    const std::size_t n = grid()->size();
    std::vector<std::complex<double>> spec(n / 2 + 1);
    for (std::size_t k = 0; k < spec.size(); ++k)
        spec[k] = k == 0 ? 1.0 : std::exp(-t * std::pow(frequency(k), 2.0 * spec_.alpha));
    auto kernel = inverse_real_dft(std::move(spec), n);
    for (double& v : kernel) v /= static_cast<double>(n);
    return kernel;
}

RowOperator StableMember::propagator(double t) const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("duration must be finite and >= 0");
    const std::size_t n = grid()->size();
    if (t == 0.0) return RowOperator::identity(n);
    auto kernel = raw_kernel(t);
    bool clipped = false;
    for (double& v : kernel)
        if (v < 0.0) {
            v = 0.0;
            clipped = true;
        }
    RowOperator op(n);
    std::vector<std::uint32_t> cols;
    std::vector<double> w;
    for (std::size_t i = 0; i < n; ++i) {
        cols.clear();
        w.clear();
        for (std::size_t j = 0; j < n; ++j) {
            const double v = kernel[(i + n - j) % n];
            if (v == 0.0) continue;
            cols.push_back(static_cast<std::uint32_t>(j));
            w.push_back(v);
        }
        normalize_exact(w);
        op.push_row(cols, w);
    }
    if (clipped) op.flagged_rows = n;
    return op;
}

GeneratorResult StableMember::generator(const GridFunction& u) const {
    const std::size_t n = u.size();
    auto spec = forward_real_dft(std::vector<double>(u.values().begin(), u.values().end()));
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= -std::pow(frequency(k), 2.0 * spec_.alpha);
    auto values = inverse_real_dft(std::move(spec), n);
    for (double& v : values) v /= static_cast<double>(n);
    return {GridFunction(u.grid(), std::move(values)), std::vector<unsigned char>(n, 1)};
}

}  // namespace nisio
