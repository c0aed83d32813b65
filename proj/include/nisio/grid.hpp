#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace nisio {

enum class BoundaryPolicy { MassRenormalize, Reflect };

enum class GridKind {
    Uniform,       // x_min + i*dx, i = 0..n-1
    Periodic,      // uniform with x_{n} identified with x_0
    LogSymmetric,  // -e^{z}, 0, +e^{z} with z uniform in [-L, L]
    Tensor2D,      // uniform product grid, row-major in y
    Labels         // finite state set 0..n-1 with the discrete metric
};

/// Weight function kappa(x) = (1 + |x|)^{-p}; p = 0 gives the constant weight.
struct KappaSpec {
    double p = 0.0;

    [[nodiscard]] double operator()(double r) const;
};

/// Uniform axis x_min + i*step, i = 0..count-1.
struct Axis {
    double x_min = 0.0;
    double step = 1.0;
    std::size_t count = 0;

    [[nodiscard]] double at(std::size_t i) const { return x_min + step * static_cast<double>(i); }
    [[nodiscard]] double x_max() const { return at(count - 1); }
};

using State = std::array<double, 2>;

/// Discretized state space with weight function and metric.
///
/// Points are stored in increasing order for the one-dimensional kinds. All
/// members of a family share one grid, held by shared_ptr.
class WeightedGrid {
public:
    static WeightedGrid uniform(double x_min, double x_max, double dx, KappaSpec kappa = {},
                                BoundaryPolicy boundary = BoundaryPolicy::MassRenormalize);
    static WeightedGrid periodic(double x_min, double period, std::size_t n, KappaSpec kappa = {});
    /// Log-spaced positive branch over [e^{-L}, e^{L}] mirrored onto x < 0, plus x = 0.
    static WeightedGrid log_symmetric(double half_width, double dz, KappaSpec kappa = {},
                                      BoundaryPolicy boundary = BoundaryPolicy::MassRenormalize);
    static WeightedGrid tensor(Axis x, Axis y, KappaSpec kappa = {},
                               BoundaryPolicy boundary = BoundaryPolicy::MassRenormalize);
    static WeightedGrid labels(std::size_t n, std::vector<double> kappa = {});

    [[nodiscard]] GridKind kind() const { return kind_; }
    [[nodiscard]] std::size_t size() const { return kappa_.size(); }
    [[nodiscard]] int dimension() const;
    [[nodiscard]] BoundaryPolicy boundary() const { return boundary_; }
    [[nodiscard]] const KappaSpec& kappa_spec() const { return kappa_spec_; }

    /// Coordinate of point i (label index for Labels, x-coordinate for Tensor2D).
    [[nodiscard]] double x(std::size_t i) const;
    [[nodiscard]] State state(std::size_t i) const;
    [[nodiscard]] std::span<const double> points() const { return points_; }
    [[nodiscard]] double kappa(std::size_t i) const { return kappa_[i]; }
    [[nodiscard]] std::span<const double> kappa() const { return kappa_; }

    [[nodiscard]] const Axis& axis_x() const { return axis_x_; }
    [[nodiscard]] const Axis& axis_y() const { return axis_y_; }
    /// Spacing of the uniform/periodic axis (dz for LogSymmetric).
    [[nodiscard]] double spacing() const { return axis_x_.step; }
    [[nodiscard]] double period() const;
    /// Number of points on one branch of a LogSymmetric grid.
    [[nodiscard]] std::size_t branch_size() const { return axis_x_.count; }
    [[nodiscard]] std::size_t zero_index() const;

    [[nodiscard]] double distance(std::size_t i, std::size_t j) const;
    /// Nearest grid point; ties resolve to the lower index.
    [[nodiscard]] std::size_t nearest(const State& s) const;
    [[nodiscard]] bool contains(const State& s) const;
    [[nodiscard]] State clamp(const State& s) const;

    /// Linear interpolation weights of an off-grid 1D coordinate, constant
    /// extrapolation outside [points.front(), points.back()].
    struct Interp {
        std::size_t lo = 0;
        std::size_t hi = 0;
        double w_hi = 0.0;
        bool extrapolated = false;
    };
    [[nodiscard]] Interp interpolate(double x) const;

private:
    WeightedGrid() = default;
    void fill_kappa();

    GridKind kind_ = GridKind::Uniform;
    BoundaryPolicy boundary_ = BoundaryPolicy::MassRenormalize;
    KappaSpec kappa_spec_{};
    Axis axis_x_{};
    Axis axis_y_{};
    std::vector<double> points_;
    std::vector<double> kappa_;
};

using GridPtr = std::shared_ptr<const WeightedGrid>;

/// One real value per grid point.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(GridPtr grid, std::vector<double> values);
    explicit GridFunction(GridPtr grid, double fill = 0.0);

    static GridFunction sample(GridPtr grid, const std::function<double(double)>& f);
    static GridFunction sample2(GridPtr grid, const std::function<double(const State&)>& f);

    [[nodiscard]] const GridPtr& grid() const { return grid_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::span<double> values() { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(double c);

private:
    GridPtr grid_;
    std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);

/// max_x kappa(x)|u(x)|. Throws InvalidInput on non-finite values.
double weighted_norm(const GridFunction& u);
/// Weighted norm restricted to points where mask is nonzero.
double weighted_norm(const GridFunction& u, std::span<const unsigned char> mask);
/// Discrete Lipschitz constant over adjacent pairs (all pairs for label grids).
double lip_seminorm(const GridFunction& u);
/// min_x kappa(x) (a(x) - b(x)).
double min_weighted_slack(const GridFunction& a, const GridFunction& b);

}  // namespace nisio
