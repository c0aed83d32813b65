#include "nisio/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nisio/errors.hpp"

namespace nisio {

double KappaSpec::operator()(double r) const {
    if (p == 0.0) return 1.0;
    return std::pow(1.0 + std::abs(r), -p);
}

namespace {

std::size_t count_steps(double lo, double hi, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("grid spacing must be positive");
    if (!(hi > lo)) throw ConfigError("grid bounds must satisfy x_min < x_max");
    const double n = std::round((hi - lo) / step);
    if (std::abs(n * step - (hi - lo)) > 1e-9 * std::max(1.0, hi - lo))
        throw ConfigError("grid spacing does not divide the domain");
    return static_cast<std::size_t>(n) + 1;
}

void check_kappa(const KappaSpec& k) {
    if (!(k.p >= 0.0) || !std::isfinite(k.p)) throw ConfigError("kappa exponent must be >= 0");
}

}  // namespace

WeightedGrid WeightedGrid::uniform(double x_min, double x_max, double dx, KappaSpec kappa,
                                   BoundaryPolicy boundary) {
    check_kappa(kappa);
    WeightedGrid g;
    g.kind_ = GridKind::Uniform;
    g.boundary_ = boundary;
    g.kappa_spec_ = kappa;
    g.axis_x_ = Axis{x_min, dx, count_steps(x_min, x_max, dx)};
    if (g.axis_x_.count < 2) throw ConfigError("uniform grid needs at least two points");
    g.points_.resize(g.axis_x_.count);
    for (std::size_t i = 0; i < g.points_.size(); ++i) g.points_[i] = g.axis_x_.at(i);
    g.fill_kappa();
    return g;
}

WeightedGrid WeightedGrid::periodic(double x_min, double period, std::size_t n, KappaSpec kappa) {
    check_kappa(kappa);
    if (n < 4) throw ConfigError("periodic grid needs at least four points");
    if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("period must be positive");
    WeightedGrid g;
    g.kind_ = GridKind::Periodic;
    g.kappa_spec_ = kappa;
    g.axis_x_ = Axis{x_min, period / static_cast<double>(n), n};
    g.points_.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.points_[i] = g.axis_x_.at(i);
    g.fill_kappa();
    return g;
}

WeightedGrid WeightedGrid::log_symmetric(double half_width, double dz, KappaSpec kappa,
                                         BoundaryPolicy boundary) {
    check_kappa(kappa);
    WeightedGrid g;
    g.kind_ = GridKind::LogSymmetric;
    g.boundary_ = boundary;
    g.kappa_spec_ = kappa;
    g.axis_x_ = Axis{-half_width, dz, count_steps(-half_width, half_width, dz)};
    const std::size_t m = g.axis_x_.count;
    g.points_.resize(2 * m + 1);
    for (std::size_t k = 0; k < m; ++k) {
        const double x = std::exp(g.axis_x_.at(k));
        g.points_[m + 1 + k] = x;
        g.points_[m - 1 - k] = -x;
    }
    g.points_[m] = 0.0;
    g.fill_kappa();
    return g;
}

WeightedGrid WeightedGrid::tensor(Axis x, Axis y, KappaSpec kappa, BoundaryPolicy boundary) {
    check_kappa(kappa);
    if (x.count < 2 || y.count < 2 || !(x.step > 0.0) || !(y.step > 0.0))
        throw ConfigError("tensor grid axes need positive spacing and two points");
    WeightedGrid g;
    g.kind_ = GridKind::Tensor2D;
    g.boundary_ = boundary;
    g.kappa_spec_ = kappa;
    g.axis_x_ = x;
    g.axis_y_ = y;
    g.points_.resize(x.count * y.count);
    for (std::size_t j = 0; j < y.count; ++j)
        for (std::size_t i = 0; i < x.count; ++i) g.points_[j * x.count + i] = x.at(i);
    g.fill_kappa();
    return g;
}

WeightedGrid WeightedGrid::labels(std::size_t n, std::vector<double> kappa) {
    if (n == 0) throw ConfigError("label set must be nonempty");
    WeightedGrid g;
    g.kind_ = GridKind::Labels;
    g.axis_x_ = Axis{0.0, 1.0, n};
    g.points_.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.points_[i] = static_cast<double>(i);
    if (kappa.empty()) kappa.assign(n, 1.0);
    if (kappa.size() != n) throw ConfigError("label weights must match the number of states");
    for (double k : kappa)
        if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("kappa must be positive and finite");
    g.kappa_ = std::move(kappa);
    return g;
}

void WeightedGrid::fill_kappa() {
    kappa_.resize(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const State s = state(i);
        kappa_[i] = kappa_spec_(std::hypot(s[0], s[1]));
    }
}

int WeightedGrid::dimension() const {
    switch (kind_) {
        case GridKind::Tensor2D: return 2;
        case GridKind::Labels: return 0;
        default: return 1;
    }
}

double WeightedGrid::x(std::size_t i) const { return points_[i]; }

State WeightedGrid::state(std::size_t i) const {
    if (kind_ == GridKind::Tensor2D) {
        const std::size_t nx = axis_x_.count;
        return {axis_x_.at(i % nx), axis_y_.at(i / nx)};
    }
    return {points_[i], 0.0};
}

double WeightedGrid::period() const {
    if (kind_ != GridKind::Periodic) throw ConfigError("grid is not periodic");
    return axis_x_.step * static_cast<double>(axis_x_.count);
}

std::size_t WeightedGrid::zero_index() const {
    if (kind_ != GridKind::LogSymmetric) throw ConfigError("grid has no distinguished zero");
    return axis_x_.count;
}

double WeightedGrid::distance(std::size_t i, std::size_t j) const {
    switch (kind_) {
        case GridKind::Labels: return i == j ? 0.0 : 1.0;
        case GridKind::Tensor2D: {
            const State a = state(i), b = state(j);
            return std::hypot(a[0] - b[0], a[1] - b[1]);
        }
        case GridKind::Periodic: {
            const double d = std::abs(points_[i] - points_[j]);
            return std::min(d, period() - d);
        }
        default: return std::abs(points_[i] - points_[j]);
    }
}

namespace {

std::size_t nearest_on_axis(const Axis& a, double x) {
    const double r = (x - a.x_min) / a.step;
    if (r <= 0.0) return 0;
    const double last = static_cast<double>(a.count - 1);
    if (r >= last) return a.count - 1;
    const double fl = std::floor(r);
    // ties go to the lower index
    return static_cast<std::size_t>(r - fl > 0.5 ? fl + 1.0 : fl);
}

}  // namespace

std::size_t WeightedGrid::nearest(const State& s) const {
    switch (kind_) {
        case GridKind::Uniform: return nearest_on_axis(axis_x_, s[0]);
        case GridKind::Labels: return nearest_on_axis(axis_x_, s[0]);
        case GridKind::Periodic: {
            const double p = period();
            double x = std::fmod(s[0] - axis_x_.x_min, p);
            if (x < 0) x += p;
            const std::size_t i = nearest_on_axis(Axis{0.0, axis_x_.step, axis_x_.count + 1}, x);
            return i % axis_x_.count;
        }
        case GridKind::Tensor2D:
            return nearest_on_axis(axis_y_, s[1]) * axis_x_.count + nearest_on_axis(axis_x_, s[0]);
        case GridKind::LogSymmetric: {
            auto it = std::lower_bound(points_.begin(), points_.end(), s[0]);
            if (it == points_.begin()) return 0;
            if (it == points_.end()) return points_.size() - 1;
            const std::size_t hi = static_cast<std::size_t>(it - points_.begin());
            return (points_[hi] - s[0] < s[0] - points_[hi - 1]) ? hi : hi - 1;
        }
    }
    return 0;
}

bool WeightedGrid::contains(const State& s) const {
    switch (kind_) {
        case GridKind::Periodic: return true;
        case GridKind::Tensor2D:
            return s[0] >= axis_x_.x_min && s[0] <= axis_x_.x_max() && s[1] >= axis_y_.x_min &&
                   s[1] <= axis_y_.x_max();
        default: return s[0] >= points_.front() && s[0] <= points_.back();
    }
}

State WeightedGrid::clamp(const State& s) const {
    switch (kind_) {
        case GridKind::Periodic: return s;
        case GridKind::Tensor2D:
            return {std::clamp(s[0], axis_x_.x_min, axis_x_.x_max()),
                    std::clamp(s[1], axis_y_.x_min, axis_y_.x_max())};
        default: return {std::clamp(s[0], points_.front(), points_.back()), 0.0};
    }
}

WeightedGrid::Interp WeightedGrid::interpolate(double x) const {
    if (dimension() != 1 && kind_ != GridKind::Labels)
        throw ConfigError("interpolation requires a one-dimensional grid");
    Interp r;
    if (x <= points_.front()) {
        r.lo = r.hi = 0;
        r.extrapolated = x < points_.front();
        return r;
    }
    if (x >= points_.back()) {
        r.lo = r.hi = points_.size() - 1;
        r.extrapolated = x > points_.back();
        return r;
    }
    std::size_t hi;
    if (kind_ == GridKind::LogSymmetric) {
        hi = static_cast<std::size_t>(std::upper_bound(points_.begin(), points_.end(), x) -
                                      points_.begin());
    } else {
        hi = static_cast<std::size_t>(std::floor((x - axis_x_.x_min) / axis_x_.step)) + 1;
        hi = std::clamp<std::size_t>(hi, 1, points_.size() - 1);
        while (hi > 1 && points_[hi - 1] > x) --hi;
        while (hi < points_.size() - 1 && points_[hi] < x) ++hi;
    }
    r.lo = hi - 1;
    r.hi = hi;
    const double w = (x - points_[r.lo]) / (points_[r.hi] - points_[r.lo]);
    r.w_hi = std::clamp(w, 0.0, 1.0);
    if (r.w_hi == 0.0) r.hi = r.lo;
    if (r.w_hi == 1.0) r.lo = r.hi;
    return r;
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw InvalidInput("grid function needs a grid");
    if (values_.size() != grid_->size()) throw InvalidInput("value count does not match grid size");
}

GridFunction::GridFunction(GridPtr grid, double fill) : grid_(std::move(grid)) {
    if (!grid_) throw InvalidInput("grid function needs a grid");
    values_.assign(grid_->size(), fill);
}

GridFunction GridFunction::sample(GridPtr grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->x(i));
    return GridFunction(std::move(grid), std::move(v));
}

GridFunction GridFunction::sample2(GridPtr grid, const std::function<double(const State&)>& f) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->state(i));
    return GridFunction(std::move(grid), std::move(v));
}

namespace {

void check_same_grid(const GridFunction& a, const GridFunction& b) {
    if (a.size() != b.size())
        throw InvalidInput("grid functions live on different grids");
}

}  // namespace

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    check_same_grid(*this, o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
    check_same_grid(*this, o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

double weighted_norm(const GridFunction& u) {
    double m = 0.0;
    const auto& g = *u.grid();
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!std::isfinite(u[i])) throw InvalidInput("weighted_norm: non-finite value");
        m = std::max(m, g.kappa(i) * std::abs(u[i]));
    }
    return m;
}

double weighted_norm(const GridFunction& u, std::span<const unsigned char> mask) {
    if (mask.size() != u.size()) throw InvalidInput("mask size does not match grid");
    double m = 0.0;
    const auto& g = *u.grid();
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!mask[i]) continue;
        if (!std::isfinite(u[i])) throw InvalidInput("weighted_norm: non-finite value");
        m = std::max(m, g.kappa(i) * std::abs(u[i]));
    }
    return m;
}

double lip_seminorm(const GridFunction& u) {
    const auto& g = *u.grid();
    if (g.size() < 2) throw InvalidInput("Lipschitz seminorm undefined on a single point");
    double m = 0.0;
    auto pair = [&](std::size_t i, std::size_t j) {
        m = std::max(m, std::abs(u[i] - u[j]) / g.distance(i, j));
    };
    switch (g.kind()) {
        case GridKind::Labels: {
            const auto [lo, hi] = std::minmax_element(u.values().begin(), u.values().end());
            return *hi - *lo;
        }
        case GridKind::Tensor2D: {
            const std::size_t nx = g.axis_x().count, ny = g.axis_y().count;
            for (std::size_t j = 0; j < ny; ++j)
                for (std::size_t i = 0; i < nx; ++i) {
                    if (i + 1 < nx) pair(j * nx + i, j * nx + i + 1);
                    if (j + 1 < ny) pair(j * nx + i, (j + 1) * nx + i);
                }
            return m;
        }
        case GridKind::Periodic:
            for (std::size_t i = 0; i < g.size(); ++i) pair(i, (i + 1) % g.size());
            return m;
        default:
            for (std::size_t i = 0; i + 1 < g.size(); ++i) pair(i, i + 1);
            return m;
    }
}

double min_weighted_slack(const GridFunction& a, const GridFunction& b) {
    check_same_grid(a, b);
    double m = std::numeric_limits<double>::infinity();
    const auto& g = *a.grid();
    for (std::size_t i = 0; i < a.size(); ++i) m = std::min(m, g.kappa(i) * (a[i] - b[i]));
    return m;
}

}  // namespace nisio
