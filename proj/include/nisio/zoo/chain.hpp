#pragma once

#include <vector>

#include "nisio/semigroup.hpp"

namespace nisio {

/// Rate matrix Q of a finite continuous-time Markov chain, row-major N x N.
struct ChainSpec {
    std::size_t states = 0;
    std::vector<double> Q;
};

/// Dense N x N matrix, row-major.
struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> a;

    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
};

/// exp(tQ) by uniformization, truncating the Poisson series once the
/// remaining mass is below 1e-12 (with scaling and squaring for large q t).
DenseMatrix uniformized_exponential(const ChainSpec& spec, double t);

/// Finite-state chain P(t) = exp(tQ) on a label grid.
class ChainMember final : public TransitionOperator {
public:
    /// Throws ConfigError unless Q_ii <= 0 and Q_ij >= 0 off the diagonal, and,
    /// when require_conservative, every row sums to zero.
    ChainMember(GridPtr grid, ChainSpec spec, bool require_conservative = true);

    [[nodiscard]] std::string name() const override;
    [[nodiscard]] RowOperator propagator(double t) const override;
    /// Q u.
    [[nodiscard]] GeneratorResult generator(const GridFunction& u) const override;
    [[nodiscard]] bool conservative() const override { return conservative_; }
    [[nodiscard]] bool has_sampler() const override { return conservative_; }
    /// Jump chain of the uniformized process: Poisson(q h) jumps through I + Q/q.
    [[nodiscard]] TransitionSampler sampler(double h) const override;

    [[nodiscard]] const ChainSpec& spec() const { return spec_; }

private:
    ChainSpec spec_;
    bool conservative_ = true;
};

}  // namespace nisio
