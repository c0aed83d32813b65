#include "nisio/gaussian_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "nisio/errors.hpp"

namespace nisio {

double LatticeKernel::mean() const {
    double s = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k)
        s += weights[k] * static_cast<double>(first + static_cast<std::ptrdiff_t>(k));
    return s;
}

double LatticeKernel::variance() const {
    const double m = mean();
    double s = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const double d = static_cast<double>(first + static_cast<std::ptrdiff_t>(k)) - m;
        s += weights[k] * d * d;
    }
    return s;
}

namespace {

constexpr double kTruncation = 12.0;

LatticeKernel sampled(double center, double sd) {
    const auto lo = static_cast<std::ptrdiff_t>(std::floor(center - kTruncation * sd)) - 1;
    const auto hi = static_cast<std::ptrdiff_t>(std::ceil(center + kTruncation * sd)) + 1;
    LatticeKernel k;
    k.first = lo;
    k.weights.resize(static_cast<std::size_t>(hi - lo + 1));
    double total = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
        const double d = (static_cast<double>(j) - center) / sd;
        const double w = std::exp(-0.5 * d * d);
        k.weights[static_cast<std::size_t>(j - lo)] = w;
        total += w;
    }
    for (double& w : k.weights) w /= total;
    // trim underflowed tails
    auto b = std::find_if(k.weights.begin(), k.weights.end(), [](double w) { return w > 0.0; });
    auto e = std::find_if(k.weights.rbegin(), k.weights.rend(), [](double w) { return w > 0.0; }).base();
    k.first += b - k.weights.begin();
    k.weights = std::vector<double>(b, e);
    return k;
}

LatticeKernel interpolation(double mean) {
    const double fl = std::floor(mean);
    const double w = mean - fl;
    LatticeKernel k;
    k.first = static_cast<std::ptrdiff_t>(fl);
    if (w == 0.0) {
        k.weights = {1.0};
    } else {
        k.weights = {1.0 - w, w};
    }
    return k;
}

// Sampled Gaussian centre that reproduces `mean` for width `sd`. The kernel is
// an exponential family in centre / sd^2, so d mean / d centre = variance / sd^2.
double matched_center(double mean, double sd) {
    double lo = mean - 1.0, hi = mean + 1.0, c = mean;
    for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, std::abs(mean)); ++it) {
        const auto k = sampled(c, sd);
        const double err = mean - k.mean();
        if (std::abs(err) <= 1e-15 * std::max(1.0, std::abs(mean))) break;
        (err > 0.0 ? lo : hi) = c;
        c += err * sd * sd / std::max(k.variance(), 1e-300);
        if (!(c > lo && c < hi)) c = 0.5 * (lo + hi);
    }
    return c;
}

double matched_variance_gap(double mean, double sd, double variance) {
    return sampled(matched_center(mean, sd), sd).variance() - variance;
}

}  // namespace

LatticeKernel gaussian_lattice_kernel(double mean, double variance, KernelRegime* regime) {
    if (!std::isfinite(mean) || !std::isfinite(variance) || variance < 0.0)
        throw InvalidInput("kernel moments must be finite with nonnegative variance");
    auto set = [&](KernelRegime r) {
        if (regime) *regime = r;
    };
    const double j0 = std::round(mean);
    const double delta = mean - j0;
    const double min_var = std::abs(delta) * (1.0 - std::abs(delta));

    if (variance == 0.0 && delta == 0.0) {
        set(KernelRegime::Identity);
        return LatticeKernel{static_cast<std::ptrdiff_t>(j0), {1.0}};
    }
    if (variance <= min_var) {
        set(KernelRegime::Interpolation);
        return interpolation(mean);
    }
    if (variance < 0.01) {
        set(KernelRegime::Stencil);
        const double q = variance + delta * delta;
        LatticeKernel k;
        k.first = static_cast<std::ptrdiff_t>(j0) - 1;
        k.weights = {std::max(0.0, 0.5 * (q - delta)), 1.0 - q, std::max(0.0, 0.5 * (q + delta))};
        return k;
    }
    if (variance >= 4.0) {
        set(KernelRegime::Sampled);
        return sampled(mean, std::sqrt(variance));
    }

    set(KernelRegime::Matched);
    // Illinois false position on the width; the gap is increasing in sd
    // at sd = 0.1 the nearest lattice point keeps a representable weight
    double a = 0.1, b = std::sqrt(variance) + 2.0;
    double fa = matched_variance_gap(mean, a, variance), fb = matched_variance_gap(mean, b, variance);
    if (fa >= 0.0) return sampled(matched_center(mean, a), a);
    int side = 0;
    double sd = b;
    for (int it = 0; it < 200; ++it) {
        sd = (a * fb - b * fa) / (fb - fa);
        if (!(sd > a && sd < b)) sd = 0.5 * (a + b);
        const double f = matched_variance_gap(mean, sd, variance);
        if (std::abs(f) <= 1e-14 * variance || b - a <= 1e-15 * b) break;
        if ((f < 0.0) == (fa < 0.0)) {
            a = sd;
            fa = f;
            if (side == -1) fb *= 0.5;
            side = -1;
        } else {
            b = sd;
            fb = f;
            if (side == 1) fa *= 0.5;
            side = 1;
        }
    }
    return sampled(matched_center(mean, sd), sd);
}

std::ptrdiff_t fold_index(std::ptrdiff_t j, std::size_t n, GridKind kind, BoundaryPolicy boundary) {
    const auto size = static_cast<std::ptrdiff_t>(n);
    const auto last = size - 1;
    if (kind == GridKind::Periodic) {
        j %= size;
        return j < 0 ? j + size : j;
    }
    if (j >= 0 && j <= last) return j;
    if (boundary == BoundaryPolicy::Reflect && last > 0) {
        while (j < 0 || j > last) j = j < 0 ? -j : 2 * last - j;
        return j;
    }
    return -1;
}

void push_kernel_row(RowOperator& op, const LatticeKernel& k, std::ptrdiff_t center, std::size_t n,
                     GridKind kind, BoundaryPolicy boundary, ColumnMap map) {
    const auto last = static_cast<std::ptrdiff_t>(n) - 1;
    std::vector<std::pair<std::uint32_t, double>> entries;
    entries.reserve(k.weights.size());
    for (std::size_t q = 0; q < k.weights.size(); ++q) {
        const std::ptrdiff_t j =
            fold_index(center + k.first + static_cast<std::ptrdiff_t>(q), n, kind, boundary);
        if (j < 0) continue;
        entries.emplace_back(map(j), k.weights[q]);
    }
    if (entries.empty()) {
        // all mass left the window: constant extrapolation from the nearest edge
        const std::ptrdiff_t j = std::clamp<std::ptrdiff_t>(center + k.first, 0, last);
        op.push_row_unit(map(j));
        ++op.flagged_rows;
        return;
    }
    std::sort(entries.begin(), entries.end());
    std::vector<std::uint32_t> cols;
    std::vector<double> weights;
    for (const auto& [c, w] : entries) {
        if (!cols.empty() && cols.back() == c) {
            weights.back() += w;
        } else {
            cols.push_back(c);
            weights.push_back(w);
        }
    }
    normalize_exact(weights);
    op.push_row(cols, weights);
}

bool push_interpolation_row(RowOperator& op, const WeightedGrid& grid, double x) {
    const auto ip = grid.interpolate(x);
    if (ip.lo == ip.hi) {
        op.push_row_unit(static_cast<std::uint32_t>(ip.lo));
    } else {
        std::vector<double> w{1.0 - ip.w_hi, ip.w_hi};
        normalize_exact(w);
        const std::uint32_t c[2] = {static_cast<std::uint32_t>(ip.lo), static_cast<std::uint32_t>(ip.hi)};
        op.push_row(c, w);
    }
    if (ip.extrapolated) ++op.flagged_rows;
    return ip.extrapolated;
}

}  // namespace nisio
