#include "nisio/zoo/ou.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "nisio/errors.hpp"
#include "nisio/gaussian_kernel.hpp"
#include "stencil.hpp"

namespace nisio {

namespace {

using Mat = Eigen::MatrixXd;

Mat to_matrix(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
    Mat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = v[i * cols + j];
    return m;
}

// Adaptive Simpson quadrature of a matrix-valued integrand, relative tolerance
// measured in the max norm of the running integral.
Mat simpson_step(const std::function<Mat(double)>& f, double a, double b, const Mat& fa, const Mat& fm,
                 const Mat& fb, const Mat& whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const Mat flm = f(0.5 * (a + m));
    const Mat frm = f(0.5 * (m + b));
    const Mat left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const Mat right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const Mat delta = left + right - whole;
    if (depth <= 0 || delta.cwiseAbs().maxCoeff() <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

Mat adaptive_simpson(const std::function<Mat(double)>& f, double a, double b, double rtol) {
    const Mat fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
    const Mat whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double scale = std::max(whole.cwiseAbs().maxCoeff(), 1e-300);
    return simpson_step(f, a, b, fa, fm, fb, whole, rtol * scale, 40);
}

}  // namespace

OUMember::OUMember(GridPtr grid, OUSpec spec) : TransitionOperator(std::move(grid)), spec_(std::move(spec)) {
    const std::size_t d = spec_.dim;
    if (d != 1 && d != 2) throw ConfigError("ou: dimension must be 1 or 2");
    if (spec_.B.size() != d * d || spec_.m.size() != d || spec_.C.size() != d * d)
        throw ConfigError("ou: B, m, C have the wrong shape");
    const Mat C = to_matrix(spec_.C, d, d);
    if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ConfigError("ou: C must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(C);
    if (es.eigenvalues().minCoeff() < -1e-12) throw ConfigError("ou: C must be positive semidefinite");
    const auto k = this->grid()->kind();
    if (d == 1 && k != GridKind::Uniform) throw ConfigError("ou: d = 1 needs a uniform grid");
    if (d == 2 && k != GridKind::Tensor2D) throw ConfigError("ou: d = 2 needs a tensor grid");
}

std::string OUMember::name() const {
    std::ostringstream os;
    os << "ou(d=" << spec_.dim << ",B=[";
    for (std::size_t i = 0; i < spec_.B.size(); ++i) os << (i ? "," : "") << spec_.B[i];
    os << "],m=[";
    for (std::size_t i = 0; i < spec_.m.size(); ++i) os << (i ? "," : "") << spec_.m[i];
    os << "],C=[";
    for (std::size_t i = 0; i < spec_.C.size(); ++i) os << (i ? "," : "") << spec_.C[i];
    os << "])";
    return os.str();
}

double OUMember::lipschitz_rate() const {
    const std::size_t d = spec_.dim;
    const Mat B = to_matrix(spec_.B, d, d);
    Eigen::JacobiSVD<Mat> svd(B);
    return svd.singularValues()(0);
}

OUMember::Moments OUMember::moments(double t) const {
    const std::size_t d = spec_.dim;
    const Mat B = to_matrix(spec_.B, d, d);
    const Mat C = to_matrix(spec_.C, d, d);
    const Mat mvec = to_matrix(spec_.m, d, 1);
    Moments mo;
    const Mat E = (t * B).exp();
    Mat shift = Mat::Zero(static_cast<Eigen::Index>(d), 1);
    Mat cov = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    if (t > 0.0) {
        if (mvec.cwiseAbs().maxCoeff() > 0.0)
            shift = adaptive_simpson([&](double s) -> Mat { return (s * B).exp() * mvec; }, 0.0, t, 1e-10);
        if (C.cwiseAbs().maxCoeff() > 0.0) {
            cov = adaptive_simpson(
                [&](double s) -> Mat {
                    const Mat es = (s * B).exp();
                    return es * C * es.transpose();
                },
                0.0, t, 1e-10);
            cov = 0.5 * (cov + cov.transpose());
            Eigen::SelfAdjointEigenSolver<Mat> es(cov);
            const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
            if (es.eigenvalues().minCoeff() < -1e-12 * scale)
                throw NumericalDegeneracy("ou: integrated covariance is not positive semidefinite");
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        mo.shift[i] = shift(static_cast<Eigen::Index>(i), 0);
        for (std::size_t j = 0; j < d; ++j) {
            mo.expB[i * 2 + j] = E(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            mo.cov[i * 2 + j] = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return mo;
}

GaussianLaw OUMember::law(double t, const State& x) const {
    const auto mo = moments(t);
    GaussianLaw g;
    g.cov = mo.cov;
    if (spec_.dim == 1) {
        g.mean[0] = mo.expB[0] * x[0] + mo.shift[0];
    } else {
        g.mean[0] = mo.expB[0] * x[0] + mo.expB[1] * x[1] + mo.shift[0];
        g.mean[1] = mo.expB[2] * x[0] + mo.expB[3] * x[1] + mo.shift[1];
    }
    return g;
}

namespace {

// Variance floor (cell^2) for non-diagonal 2D covariances, below which a
// sampled Gaussian no longer reproduces its moments on the lattice.
constexpr double kCellVarianceFloor = 1.0;

void push_tensor_row(RowOperator& op, const WeightedGrid& g, const LatticeKernel& kx,
                     const LatticeKernel& ky, std::ptrdiff_t cx, std::ptrdiff_t cy) {
    const std::size_t nx = g.axis_x().count, ny = g.axis_y().count;
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (std::size_t b = 0; b < ky.weights.size(); ++b) {
        const auto jy = fold_index(cy + ky.first + static_cast<std::ptrdiff_t>(b), ny, g.kind(), g.boundary());
        if (jy < 0) continue;
        for (std::size_t a = 0; a < kx.weights.size(); ++a) {
            const auto jx =
                fold_index(cx + kx.first + static_cast<std::ptrdiff_t>(a), nx, g.kind(), g.boundary());
            if (jx < 0) continue;
            entries.emplace_back(static_cast<std::uint32_t>(static_cast<std::size_t>(jy) * nx +
                                                            static_cast<std::size_t>(jx)),
                                 kx.weights[a] * ky.weights[b]);
        }
    }
    if (entries.empty()) {
        const auto jx = std::clamp<std::ptrdiff_t>(cx + kx.first, 0, static_cast<std::ptrdiff_t>(nx) - 1);
        const auto jy = std::clamp<std::ptrdiff_t>(cy + ky.first, 0, static_cast<std::ptrdiff_t>(ny) - 1);
        op.push_row_unit(static_cast<std::uint32_t>(static_cast<std::size_t>(jy) * nx + static_cast<std::size_t>(jx)));
        ++op.flagged_rows;
        return;
    }
    std::sort(entries.begin(), entries.end());
    std::vector<std::uint32_t> cols;
    std::vector<double> w;
    for (const auto& [c, v] : entries) {
        if (!cols.empty() && cols.back() == c) {
            w.back() += v;
        } else {
            cols.push_back(c);
            w.push_back(v);
        }
    }
    normalize_exact(w);
    op.push_row(cols, w);
}

void push_correlated_row(RowOperator& op, const WeightedGrid& g, double mx, double my,
                         const std::array<double, 4>& cov_cells) {
    const std::size_t nx = g.axis_x().count, ny = g.axis_y().count;
    Eigen::Matrix2d S;
    S << cov_cells[0], cov_cells[1], cov_cells[2], cov_cells[3];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(S);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < kCellVarianceFloor) S += (kCellVarianceFloor - lmin) * Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d P = S.inverse();
    const double rx = 12.0 * std::sqrt(S(0, 0)) + 1.0, ry = 12.0 * std::sqrt(S(1, 1)) + 1.0;
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (auto b = static_cast<std::ptrdiff_t>(std::floor(my - ry)); b <= static_cast<std::ptrdiff_t>(std::ceil(my + ry)); ++b) {
        const auto jy = fold_index(b, ny, g.kind(), g.boundary());
        if (jy < 0) continue;
        for (auto a = static_cast<std::ptrdiff_t>(std::floor(mx - rx)); a <= static_cast<std::ptrdiff_t>(std::ceil(mx + rx)); ++a) {
            const auto jx = fold_index(a, nx, g.kind(), g.boundary());
            if (jx < 0) continue;
            const double dx = static_cast<double>(a) - mx, dy = static_cast<double>(b) - my;
            const double q = P(0, 0) * dx * dx + 2.0 * P(0, 1) * dx * dy + P(1, 1) * dy * dy;
            const double w = std::exp(-0.5 * q);
            if (w == 0.0) continue;
            entries.emplace_back(static_cast<std::uint32_t>(static_cast<std::size_t>(jy) * nx +
                                                            static_cast<std::size_t>(jx)), w);
        }
    }
    if (entries.empty()) {
        const auto jx = std::clamp<std::ptrdiff_t>(std::llround(mx), 0, static_cast<std::ptrdiff_t>(nx) - 1);
        const auto jy = std::clamp<std::ptrdiff_t>(std::llround(my), 0, static_cast<std::ptrdiff_t>(ny) - 1);
        op.push_row_unit(static_cast<std::uint32_t>(static_cast<std::size_t>(jy) * nx + static_cast<std::size_t>(jx)));
        ++op.flagged_rows;
        return;
    }
    std::sort(entries.begin(), entries.end());
    std::vector<std::uint32_t> cols;
    std::vector<double> w;
    for (const auto& [c, v] : entries) {
        if (!cols.empty() && cols.back() == c) {
            w.back() += v;
        } else {
            cols.push_back(c);
            w.push_back(v);
        }
    }
    normalize_exact(w);
    op.push_row(cols, w);
}

}  // namespace

RowOperator OUMember::propagator(double t) const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("duration must be finite and >= 0");
    const auto& g = *grid();
    const std::size_t n = g.size();
    if (t == 0.0) return RowOperator::identity(n);
    const auto mo = moments(t);
    RowOperator op(n);
    if (spec_.dim == 1) {
        const double dx = g.spacing();
        const double var = mo.cov[0] / (dx * dx);
        for (std::size_t i = 0; i < n; ++i) {
            // displacement in cells, so a zero drift lands exactly on i
            const double mean =
                static_cast<double>(i) + ((mo.expB[0] - 1.0) * g.x(i) + mo.shift[0]) / dx;
            const double j0 = std::round(mean);
            LatticeKernel k = gaussian_lattice_kernel(mean - j0, var);
            push_kernel_row(op, k, static_cast<std::ptrdiff_t>(j0), n, g.kind(), g.boundary());
        }
        return op;
    }
    const auto& ax = g.axis_x();
    const auto& ay = g.axis_y();
    const std::array<double, 4> cells{mo.cov[0] / (ax.step * ax.step), mo.cov[1] / (ax.step * ay.step),
                                      mo.cov[2] / (ax.step * ay.step), mo.cov[3] / (ay.step * ay.step)};
    const bool diagonal = cells[1] == 0.0 && cells[2] == 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const State x = g.state(i);
        const double mx = static_cast<double>(i % ax.count) +
                          ((mo.expB[0] - 1.0) * x[0] + mo.expB[1] * x[1] + mo.shift[0]) / ax.step;
        const double my = static_cast<double>(i / ax.count) +
                          (mo.expB[2] * x[0] + (mo.expB[3] - 1.0) * x[1] + mo.shift[1]) / ay.step;
        if (diagonal) {
            const double jx = std::round(mx), jy = std::round(my);
            push_tensor_row(op, g, gaussian_lattice_kernel(mx - jx, cells[0]),
                            gaussian_lattice_kernel(my - jy, cells[3]), static_cast<std::ptrdiff_t>(jx),
                            static_cast<std::ptrdiff_t>(jy));
        } else {
            push_correlated_row(op, g, mx, my, cells);
        }
    }
    return op;
}

GeneratorResult OUMember::generator(const GridFunction& u) const {
    const auto& g = *u.grid();
    const auto& B = spec_.B;
    const auto& m = spec_.m;
    const auto& C = spec_.C;
    if (spec_.dim == 1) {
        auto d = detail::derivatives_1d(u);
        GeneratorResult r{GridFunction(u.grid()), std::move(d.valid)};
        for (std::size_t i = 0; i < u.size(); ++i)
            if (r.valid[i]) r.values[i] = d.d1[i] * (B[0] * g.x(i) + m[0]) + 0.5 * C[0] * d.d2[i];
        return r;
    }
    const std::size_t nx = g.axis_x().count, ny = g.axis_y().count;
    const double hx = g.axis_x().step, hy = g.axis_y().step;
    GeneratorResult r{GridFunction(u.grid()), std::vector<unsigned char>(u.size(), 0)};
    for (std::size_t j = 1; j + 1 < ny; ++j)
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            const std::size_t c = j * nx + i;
            const State x = g.state(c);
            const double ux = (u[c + 1] - u[c - 1]) / (2 * hx);
            const double uy = (u[c + nx] - u[c - nx]) / (2 * hy);
            const double uxx = (u[c + 1] - 2 * u[c] + u[c - 1]) / (hx * hx);
            const double uyy = (u[c + nx] - 2 * u[c] + u[c - nx]) / (hy * hy);
            const double uxy = (u[c + nx + 1] - u[c + nx - 1] - u[c - nx + 1] + u[c - nx - 1]) / (4 * hx * hy);
            const double bx = B[0] * x[0] + B[1] * x[1] + m[0];
            const double by = B[2] * x[0] + B[3] * x[1] + m[1];
            r.values[c] = ux * bx + uy * by + 0.5 * (C[0] * uxx + (C[1] + C[2]) * uxy + C[3] * uyy);
            r.valid[c] = 1;
        }
    return r;
}

TransitionSampler OUMember::sampler(double h) const {
    const auto mo = moments(h);
    const std::size_t d = spec_.dim;
    // square root of the covariance through its eigendecomposition (PSD safe)
    Eigen::Matrix2d S = Eigen::Matrix2d::Zero();
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = mo.cov[i * 2 + j];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(S);
    const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::Matrix2d root = es.eigenvectors() * ev.asDiagonal();
    return [mo, root, d](const State& s, std::mt19937_64& rng) {
        std::normal_distribution<double> z;
        Eigen::Vector2d noise(z(rng), d == 2 ? z(rng) : 0.0);
        const Eigen::Vector2d e = root * noise;
        State out{};
        if (d == 1) {
            out[0] = mo.expB[0] * s[0] + mo.shift[0] + e(0);
        } else {
            out[0] = mo.expB[0] * s[0] + mo.expB[1] * s[1] + mo.shift[0] + e(0);
            out[1] = mo.expB[2] * s[0] + mo.expB[3] * s[1] + mo.shift[1] + e(1);
        }
        return out;
    };
}

}  // namespace nisio
