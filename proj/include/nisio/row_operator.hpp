#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nisio {

/// Sparse row matrix (CSR) acting on grid values: out[i] = sum_k w_ik u[c_ik].
///
/// Every discretized member semigroup S_lambda(h) is one of these. Rows of a
/// transition operator carry nonnegative weights whose left-to-right
/// floating-point sum is exactly 1, so application is exactly monotone and
/// maps the constant 1 to 1 bit-for-bit.
class RowOperator {
public:
    RowOperator() = default;
    explicit RowOperator(std::size_t cols) : cols_(cols) {}

    static RowOperator identity(std::size_t n);

    /// Appends one row; entries with zero weight are dropped.
    void push_row(std::span<const std::uint32_t> cols, std::span<const double> weights);
    void push_row_unit(std::uint32_t col);

    [[nodiscard]] std::size_t rows() const { return offsets_.size() - 1; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] std::size_t nonzeros() const { return weights_.size(); }

    [[nodiscard]] std::span<const std::uint32_t> row_cols(std::size_t i) const {
        return {cols_idx_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    [[nodiscard]] std::span<const double> row_weights(std::size_t i) const {
        return {weights_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }

    /// Row dot product, summed left to right.
    [[nodiscard]] double row_apply(std::size_t i, std::span<const double> u) const {
        const std::size_t b = offsets_[i], e = offsets_[i + 1];
        double s = 0.0;
        for (std::size_t k = b; k < e; ++k) s += weights_[k] * u[cols_idx_[k]];
        return s;
    }

    /// Data-parallel application (OpenMP over rows).
    void apply(std::span<const double> u, std::span<double> out) const;

    [[nodiscard]] double min_weight() const;
    /// Largest deviation of a row's floating-point sum from 1.
    [[nodiscard]] double max_row_sum_defect() const;
    /// max_i kappa_i sum_k |w_ik| / kappa_{c_ik}: operator norm in the weighted sup norm.
    [[nodiscard]] double weighted_operator_norm(std::span<const double> kappa) const;

    /// Rows whose target left the truncated domain (Koopman flows, OU means).
    std::size_t flagged_rows = 0;

private:
    std::size_t cols_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::uint32_t> cols_idx_;
    std::vector<double> weights_;
};

/// Scales weights to unit mass and nudges the largest entry until the
/// left-to-right floating-point sum equals 1 exactly.
void normalize_exact(std::span<double> weights);

namespace kernels {

/// out[i] = max_m (members[m] u)[i], argmax[i] = lowest maximizing index.
/// OpenMP over grid points; members share the column space of u.
void envelope_max(std::span<const RowOperator* const> members, std::span<const double> u,
                  std::span<double> out, std::span<std::int32_t> argmax);

/// out[i] = (members[selector[i]] u)[i].
void select_apply(std::span<const RowOperator* const> members,
                  std::span<const std::int32_t> selector, std::span<const double> u,
                  std::span<double> out);

}  // namespace kernels

/// Serial versions of the kernels, kept as the reference the parallel ones are
/// tested and benchmarked against.
namespace reference {

void apply(const RowOperator& op, std::span<const double> u, std::span<double> out);
void envelope_max(std::span<const RowOperator* const> members, std::span<const double> u,
                  std::span<double> out, std::span<std::int32_t> argmax);
void select_apply(std::span<const RowOperator* const> members,
                  std::span<const std::int32_t> selector, std::span<const double> u,
                  std::span<double> out);

}  // namespace reference

}  // namespace nisio
