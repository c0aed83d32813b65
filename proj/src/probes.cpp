#include "nisio/probes.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "nisio/errors.hpp"

namespace nisio {

double smooth_bump(double r) {
    const double a = std::abs(r);
    if (a >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - a * a));
}

std::function<double(const State&)> probe_function(const ProbeSpec& p) {
    const std::string& k = p.kind;
    if (k == "const") return [c = p.value](const State&) { return c; };
    if (k == "linear") return [](const State& s) { return s[0]; };
    if (k == "quadratic") return [](const State& s) { return s[0] * s[0] + s[1] * s[1]; };
    if (k == "neg-quadratic") return [](const State& s) { return -(s[0] * s[0] + s[1] * s[1]); };
    if (k == "sin") return [f = p.frequency](const State& s) { return std::sin(f * s[0]); };
    if (k == "cos") return [f = p.frequency](const State& s) { return std::cos(f * s[0]); };
    if (k == "call") return [K = p.strike](const State& s) { return std::max(s[0] - K, 0.0); };
    if (k == "bump") {
        if (!(p.width > 0.0)) throw ConfigError("bump width must be positive");
        return [c = p.center, w = p.width](const State& s) {
            return smooth_bump(std::hypot(s[0] - c, s[1]) / w);
        };
    }
    if (k == "csv") throw ConfigError("csv probes are tabulated, not pointwise");
    throw ConfigError("unknown probe kind '" + k + "'");
}

namespace {

GridFunction read_csv_probe(const GridPtr& grid, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open probe table '" + path + "'");
    std::vector<double> values;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string xs, us;
        if (!std::getline(ls, xs, ',') || !std::getline(ls, us))
            throw ConfigError("probe table: expected 'x,u' rows");
        double x = 0.0, u = 0.0;
        try {
            x = std::stod(xs);
            u = std::stod(us);
        } catch (const std::exception&) {
            if (row == 0 && values.empty()) {
                ++row;
                continue;  // header
            }
            throw ConfigError("probe table: unparsable row '" + line + "'");
        }
        ++row;
        if (values.size() >= grid->size()) throw ConfigError("probe table has more rows than the grid");
        const double xi = grid->x(values.size());
        if (grid->dimension() == 1 && std::abs(x - xi) > 1e-9 * std::max(1.0, std::abs(xi)))
            throw ConfigError("probe table abscissae do not match the grid");
        values.push_back(u);
    }
    if (values.size() != grid->size()) throw ConfigError("probe table has fewer rows than the grid");
    return GridFunction(grid, std::move(values));
}

}  // namespace

GridFunction make_probe(const GridPtr& grid, const ProbeSpec& spec) {
    if (spec.kind == "csv") return read_csv_probe(grid, spec.csv_path);
    return GridFunction::sample2(grid, probe_function(spec));
}

double evaluate(const GridFunction& u, const State& s) {
    const auto& g = *u.grid();
    if (g.kind() == GridKind::Tensor2D || g.kind() == GridKind::Labels) return u[g.nearest(s)];
    const auto ip = g.interpolate(s[0]);
    return (1.0 - ip.w_hi) * u[ip.lo] + ip.w_hi * u[ip.hi];
}

}  // namespace nisio
