#include "nisio/row_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nisio/errors.hpp"

namespace nisio {

RowOperator RowOperator::identity(std::size_t n) {
    RowOperator op(n);
    for (std::size_t i = 0; i < n; ++i) op.push_row_unit(static_cast<std::uint32_t>(i));
    return op;
}

void RowOperator::push_row(std::span<const std::uint32_t> cols, std::span<const double> weights) {
    if (cols.size() != weights.size()) throw InvalidInput("row column/weight size mismatch");
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (weights[k] == 0.0) continue;
        if (cols[k] >= cols_) throw InvalidInput("row column index out of range");
        cols_idx_.push_back(cols[k]);
        weights_.push_back(weights[k]);
    }
    offsets_.push_back(weights_.size());
}

void RowOperator::push_row_unit(std::uint32_t col) {
    if (col >= cols_) throw InvalidInput("row column index out of range");
    cols_idx_.push_back(col);
    weights_.push_back(1.0);
    offsets_.push_back(weights_.size());
}

void RowOperator::apply(std::span<const double> u, std::span<double> out) const {
    if (u.size() != cols_ || out.size() != rows()) throw InvalidInput("row operator size mismatch");
    const auto n = static_cast<std::ptrdiff_t>(rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = row_apply(static_cast<std::size_t>(i), u);
}

double RowOperator::min_weight() const {
    if (weights_.empty()) return 0.0;
    return *std::min_element(weights_.begin(), weights_.end());
}

double RowOperator::max_row_sum_defect() const {
    double d = 0.0;
    for (std::size_t i = 0; i < rows(); ++i) {
        double s = 0.0;
        for (double w : row_weights(i)) s += w;
        d = std::max(d, std::abs(s - 1.0));
    }
    return d;
}

double RowOperator::weighted_operator_norm(std::span<const double> kappa) const {
    double m = 0.0;
    for (std::size_t i = 0; i < rows(); ++i) {
        const auto c = row_cols(i);
        const auto w = row_weights(i);
        double s = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) s += std::abs(w[k]) / kappa[c[k]];
        m = std::max(m, kappa[i] * s);
    }
    return m;
}

void normalize_exact(std::span<double> weights) {
    if (weights.empty()) throw InvalidInput("cannot normalize an empty row");
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0) || !std::isfinite(total)) throw NumericalDegeneracy("row has no mass");
    for (double& w : weights) w /= total;
    const auto big = std::max_element(weights.begin(), weights.end());
    for (int iter = 0; iter < 16; ++iter) {
        double s = 0.0;
        for (double w : weights) s += w;
        if (s == 1.0) return;
        *big += 1.0 - s;
    }
    // Fallback: choose the last weight so the final addition lands on 1.
    // fl(p + fl(1 - p)) == 1 for every p in [0, 1].
    const auto last = weights.size() - 1;
    auto prefix = [&] {
        double p = 0.0;
        for (std::size_t k = 0; k < last; ++k) p += weights[k];
        return p;
    };
    double p = prefix();
    auto donor = big - weights.begin() == static_cast<std::ptrdiff_t>(last) && last > 0
                     ? std::max_element(weights.begin(), weights.begin() + static_cast<std::ptrdiff_t>(last))
                     : big;
    for (int iter = 0; p > 1.0 && iter < 1024; ++iter) {
        *donor = std::nextafter(*donor, 0.0);
        p = prefix();
    }
    weights[last] = 1.0 - p;
    double check = 0.0;
    for (double w : weights) check += w;
    if (check != 1.0 || weights[last] < 0.0) throw NumericalDegeneracy("row normalization failed");
}

namespace {

void check_members(std::span<const RowOperator* const> members, std::span<const double> u,
                   std::size_t out_size) {
    if (members.empty()) throw ConfigError("envelope over an empty family");
    for (const auto* m : members)
        if (m->cols() != u.size() || m->rows() != out_size)
            throw InvalidInput("member operator size mismatch");
}

inline void max_at(std::span<const RowOperator* const> members, std::span<const double> u,
                   std::size_t i, double& best, std::int32_t& arg) {
    best = members[0]->row_apply(i, u);
    arg = 0;
    for (std::size_t m = 1; m < members.size(); ++m) {
        const double v = members[m]->row_apply(i, u);
        if (v > best) {
            best = v;
            arg = static_cast<std::int32_t>(m);
        }
    }
}

inline double select_at(std::span<const RowOperator* const> members,
                        std::span<const std::int32_t> selector, std::span<const double> u,
                        std::size_t i) {
    const auto s = selector[i];
    if (s < 0 || static_cast<std::size_t>(s) >= members.size())
        throw ConfigError("selector index out of range");
    return members[static_cast<std::size_t>(s)]->row_apply(i, u);
}

}  // namespace

namespace kernels {

void envelope_max(std::span<const RowOperator* const> members, std::span<const double> u,
                  std::span<double> out, std::span<std::int32_t> argmax) {
    check_members(members, u, out.size());
    const bool want_arg = !argmax.empty();
    const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double best;
        std::int32_t arg;
        max_at(members, u, static_cast<std::size_t>(i), best, arg);
        out[i] = best;
        if (want_arg) argmax[i] = arg;
    }
}

void select_apply(std::span<const RowOperator* const> members,
                  std::span<const std::int32_t> selector, std::span<const double> u,
                  std::span<double> out) {
    check_members(members, u, out.size());
    if (selector.size() != out.size()) throw InvalidInput("selector size mismatch");
    for (auto s : selector)
        if (s < 0 || static_cast<std::size_t>(s) >= members.size())
            throw ConfigError("selector index out of range");
    const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[i] = members[static_cast<std::size_t>(selector[i])]->row_apply(
            static_cast<std::size_t>(i), u);
}

}  // namespace kernels

namespace reference {

void apply(const RowOperator& op, std::span<const double> u, std::span<double> out) {
    if (u.size() != op.cols() || out.size() != op.rows())
        throw InvalidInput("row operator size mismatch");
    for (std::size_t i = 0; i < op.rows(); ++i) {
        const auto c = op.row_cols(i);
        const auto w = op.row_weights(i);
        double s = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) s += w[k] * u[c[k]];
        out[i] = s;
    }
}

void envelope_max(std::span<const RowOperator* const> members, std::span<const double> u,
                  std::span<double> out, std::span<std::int32_t> argmax) {
    check_members(members, u, out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double best;
        std::int32_t arg;
        max_at(members, u, i, best, arg);
        out[i] = best;
        if (!argmax.empty()) argmax[i] = arg;
    }
}

void select_apply(std::span<const RowOperator* const> members,
                  std::span<const std::int32_t> selector, std::span<const double> u,
                  std::span<double> out) {
    check_members(members, u, out.size());
    if (selector.size() != out.size()) throw InvalidInput("selector size mismatch");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = select_at(members, selector, u, i);
}

}  // namespace reference

}  // namespace nisio
