#include "nisio/partition.hpp"

#include <algorithm>
#include <cmath>

#include "nisio/errors.hpp"

namespace nisio {

Partition::Partition(std::vector<double> times) : times_(std::move(times)) {
    if (times_.empty() || times_.front() != 0.0) throw InvalidInput("partition must start at 0");
    for (std::size_t j = 1; j < times_.size(); ++j) {
        if (!std::isfinite(times_[j]) || !(times_[j] > times_[j - 1]))
            throw InvalidInput("partition times must be finite and strictly increasing");
        gaps_.push_back(times_[j] - times_[j - 1]);
    }
}

Partition Partition::dyadic(double t, unsigned level) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("horizon must be finite and >= 0");
    if (t == 0.0) return Partition({0.0});
    if (level > 30) throw InvalidInput("dyadic level too large");
    const std::size_t m = std::size_t{1} << level;
    return uniform(t, static_cast<unsigned>(m));
}

Partition Partition::uniform(double t, unsigned m) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("horizon must be finite and >= 0");
    if (m == 0) throw InvalidInput("partition needs at least one step");
    if (t == 0.0) return Partition({0.0});
    Partition p;
    const double h = t / static_cast<double>(m);
    p.times_.resize(m + 1);
    for (unsigned k = 0; k <= m; ++k) p.times_[k] = t * static_cast<double>(k) / static_cast<double>(m);
    p.times_.back() = t;
    p.gaps_.assign(m, h);
    return p;
}

double Partition::mesh() const {
    if (gaps_.empty()) return 0.0;
    return *std::max_element(gaps_.begin(), gaps_.end());
}

bool Partition::refines_into(const Partition& finer) const {
    return std::includes(finer.times_.begin(), finer.times_.end(), times_.begin(), times_.end());
}

Partition Partition::merged(const Partition& other) const {
    std::vector<double> all;
    std::set_union(times_.begin(), times_.end(), other.times_.begin(), other.times_.end(),
                   std::back_inserter(all));
    return Partition(std::move(all));
}

}  // namespace nisio
