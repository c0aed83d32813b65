#pragma once

#include <span>
#include <vector>

namespace nisio {

/// Finite time partition 0 = t_0 < t_1 < ... < t_m.
class Partition {
public:
    /// Throws InvalidInput unless times start at 0 and strictly increase.
    explicit Partition(std::vector<double> times);

    /// {k t / 2^level : k = 0..2^level}, with every gap equal to t / 2^level.
    static Partition dyadic(double t, unsigned level);
    /// {k t / m : k = 0..m}.
    static Partition uniform(double t, unsigned m);

    [[nodiscard]] std::span<const double> times() const { return times_; }
    [[nodiscard]] double endpoint() const { return times_.back(); }
    [[nodiscard]] double mesh() const;
    /// Consecutive differences t_j - t_{j-1}, j = 1..m.
    [[nodiscard]] const std::vector<double>& gaps() const { return gaps_; }
    /// True if every point of this partition also belongs to `finer`.
    [[nodiscard]] bool refines_into(const Partition& finer) const;
    /// Union of the two point sets.
    [[nodiscard]] Partition merged(const Partition& other) const;

private:
    Partition() = default;
    std::vector<double> times_;
    std::vector<double> gaps_;
};

}  // namespace nisio
