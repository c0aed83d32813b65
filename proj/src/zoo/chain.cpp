#include "nisio/zoo/chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nisio/errors.hpp"

namespace nisio {

namespace {

DenseMatrix identity(std::size_t n) {
    DenseMatrix m{n, std::vector<double>(n * n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    const std::size_t n = a.n;
    DenseMatrix c{n, std::vector<double>(n * n, 0.0)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

double jump_rate(const ChainSpec& spec) {
    double q = 0.0;
    for (std::size_t i = 0; i < spec.states; ++i) q = std::max(q, -spec.Q[i * spec.states + i]);
    return q;
}

DenseMatrix jump_matrix(const ChainSpec& spec, double q) {
    const std::size_t n = spec.states;
    DenseMatrix p = identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) p(i, j) += spec.Q[i * n + j] / q;
    for (double& v : p.a) v = std::max(v, 0.0);
    return p;
}

constexpr double kMaxRateTime = 32.0;

}  // namespace

DenseMatrix uniformized_exponential(const ChainSpec& spec, double t) {
    const std::size_t n = spec.states;
    const double q = jump_rate(spec);
    if (q == 0.0 || t == 0.0) return identity(n);
    int squarings = 0;
    double tau = t;
    while (q * tau > kMaxRateTime) {
        tau *= 0.5;
        ++squarings;
    }
    const DenseMatrix P = jump_matrix(spec, q);
    const double lambda = q * tau;
    // sum_k e^{-lambda} lambda^k / k! P^k until the Poisson tail is below 1e-12
    DenseMatrix power = identity(n);
    DenseMatrix result{n, std::vector<double>(n * n, 0.0)};
    double weight = std::exp(-lambda);
    double mass = 0.0;
    for (int k = 0; k < 100000; ++k) {
        for (std::size_t e = 0; e < n * n; ++e) result.a[e] += weight * power.a[e];
        mass += weight;
        if (1.0 - mass <= 1e-13 && static_cast<double>(k) > lambda) break;
        power = multiply(power, P);
        weight *= lambda / static_cast<double>(k + 1);
    }
    for (int s = 0; s < squarings; ++s) result = multiply(result, result);
    return result;
}

ChainMember::ChainMember(GridPtr grid, ChainSpec spec, bool require_conservative)
    : TransitionOperator(std::move(grid)), spec_(std::move(spec)) {
    const std::size_t n = spec_.states;
    if (this->grid()->kind() != GridKind::Labels || this->grid()->size() != n)
        throw ConfigError("chain: needs a label grid with one point per state");
    if (spec_.Q.size() != n * n) throw ConfigError("chain: Q must be N x N");
    double scale = 0.0;
    for (double v : spec_.Q) {
        if (!std::isfinite(v)) throw ConfigError("chain: Q must be finite");
        scale = std::max(scale, std::abs(v));
    }
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = spec_.Q[i * n + j];
            if (i == j && v > 0.0) throw ConfigError("chain: diagonal rates must be <= 0");
            if (i != j && v < 0.0) throw ConfigError("chain: off-diagonal rates must be >= 0");
            row += v;
        }
        if (row > 1e-12 * std::max(1.0, scale)) throw ConfigError("chain: row sums must be <= 0");
        if (std::abs(row) > 1e-12 * std::max(1.0, scale)) conservative_ = false;
    }
    if (require_conservative && !conservative_)
        throw ConfigError("chain: stochastic representation needs a conservative rate matrix");
}

std::string ChainMember::name() const {
    std::ostringstream os;
    os << "chain(N=" << spec_.states << ",Q=[";
    for (std::size_t i = 0; i < spec_.Q.size(); ++i) os << (i ? "," : "") << spec_.Q[i];
    os << "])";
    return os.str();
}

RowOperator ChainMember::propagator(double t) const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("duration must be finite and >= 0");
    const std::size_t n = spec_.states;
    if (t == 0.0 || jump_rate(spec_) == 0.0) return RowOperator::identity(n);
    const DenseMatrix P = uniformized_exponential(spec_, t);
    RowOperator op(n);
    std::vector<std::uint32_t> cols;
    std::vector<double> w;
    for (std::size_t i = 0; i < n; ++i) {
        cols.clear();
        w.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (P(i, j) <= 0.0) continue;
            cols.push_back(static_cast<std::uint32_t>(j));
            w.push_back(P(i, j));
        }
        if (conservative_) normalize_exact(w);
        op.push_row(cols, w);
    }
    return op;
}

GeneratorResult ChainMember::generator(const GridFunction& u) const {
    const std::size_t n = spec_.states;
    GeneratorResult r{GridFunction(u.grid()), std::vector<unsigned char>(n, 1)};
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += spec_.Q[i * n + j] * u[j];
        r.values[i] = s;
    }
    return r;
}

TransitionSampler ChainMember::sampler(double h) const {
    if (!conservative_) throw ConfigError("chain: sampling needs a conservative rate matrix");
    const std::size_t n = spec_.states;
    const double q = jump_rate(spec_);
    if (q == 0.0 || h == 0.0)
        return [](const State& s, std::mt19937_64&) { return s; };
    const DenseMatrix P = jump_matrix(spec_, q);
    std::vector<double> cdf(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        double c = 0.0;
        for (std::size_t j = 0; j < n; ++j) cdf[i * n + j] = (c += P(i, j));
        cdf[i * n + n - 1] = 1.0;
    }
    const double mean_jumps = q * h;
    return [cdf = std::move(cdf), n, mean_jumps](const State& s, std::mt19937_64& rng) {
        std::poisson_distribution<long> jumps(mean_jumps);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        auto state = static_cast<std::size_t>(std::llround(s[0]));
        for (long k = jumps(rng); k > 0; --k) {
            const double r = unif(rng);
            const auto* row = cdf.data() + state * n;
            state = static_cast<std::size_t>(std::upper_bound(row, row + n, r) - row);
            if (state >= n) state = n - 1;
        }
        return State{static_cast<double>(state), 0.0};
    };
}

}  // namespace nisio
