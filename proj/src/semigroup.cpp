#include "nisio/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include "nisio/errors.hpp"

namespace nisio {

double GeneratorResult::weighted_norm() const { return nisio::weighted_norm(values, valid); }

TransitionSampler TransitionOperator::sampler(double) const {
    throw ConfigError(name() + ": no exact transition sampler");
}

GridFunction TransitionOperator::apply(double t, const GridFunction& u) const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("duration must be finite and >= 0");
    if (u.size() != grid_->size()) throw InvalidInput("grid function does not match member grid");
    if (t == 0.0) return u;
    GridFunction out(grid_);
    propagator(t).apply(u.values(), out.values());
    return out;
}

SemigroupFamily::SemigroupFamily(std::vector<MemberPtr> members, FamilyBounds bounds)
    : members_(std::move(members)), bounds_(bounds) {
    if (members_.empty()) throw ConfigError("semigroup family needs at least one member");
    for (const auto& m : members_) {
        if (!m) throw ConfigError("null family member");
        if (m->grid() != members_.front()->grid() && m->grid()->size() != grid()->size())
            throw ConfigError("family members must share one grid");
    }
}

FamilyBounds measure_bounds(const SemigroupFamily& family, double h) {
    if (!(h > 0.0)) throw InvalidInput("bounds need a positive step");
    FamilyBounds b;
    const auto kappa = family.grid()->kappa();
    for (const auto& m : family.members()) {
        const double norm = m->propagator(h).weighted_operator_norm(kappa);
        b.alpha = std::max(b.alpha, std::log(norm) / h);
        b.beta = std::max(b.beta, m->lipschitz_rate());
    }
    return b;
}

}  // namespace nisio
