#include "nisio/zoo/scaled.hpp"

#include <cmath>
#include <sstream>

#include "nisio/errors.hpp"

namespace nisio {

ScaledMember::ScaledMember(MemberPtr base, double lambda)
    : TransitionOperator(base ? base->grid() : nullptr), base_(std::move(base)), lambda_(lambda) {
    if (!base_) throw ConfigError("scaled: missing base member");
    if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) throw ConfigError("scaled: lambda must be >= 0");
}

std::string ScaledMember::name() const {
    std::ostringstream os;
    os << "scaled(lambda=" << lambda_ << "," << base_->name() << ")";
    return os.str();
}

RowOperator ScaledMember::propagator(double t) const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("duration must be finite and >= 0");
    if (lambda_ == 0.0 || t == 0.0) return RowOperator::identity(grid()->size());
    return base_->propagator(lambda_ * t);
}

GeneratorResult ScaledMember::generator(const GridFunction& u) const {
    auto r = base_->generator(u);
    r.values *= lambda_;
    return r;
}

TransitionSampler ScaledMember::sampler(double h) const {
    if (lambda_ == 0.0) return [](const State& s, std::mt19937_64&) { return s; };
    return base_->sampler(lambda_ * h);
}

}  // namespace nisio
