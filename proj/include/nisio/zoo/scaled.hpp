#pragma once

#include "nisio/semigroup.hpp"

namespace nisio {

/// Time-dilated member S_lambda(t) = S(lambda t); lambda = 0 is the identity.
class ScaledMember final : public TransitionOperator {
public:
    ScaledMember(MemberPtr base, double lambda);

    [[nodiscard]] std::string name() const override;
    [[nodiscard]] RowOperator propagator(double t) const override;
    [[nodiscard]] GeneratorResult generator(const GridFunction& u) const override;
    [[nodiscard]] double lipschitz_rate() const override { return lambda_ * base_->lipschitz_rate(); }
    [[nodiscard]] bool translation_invariant() const override { return base_->translation_invariant(); }
    [[nodiscard]] bool conservative() const override { return base_->conservative(); }
    [[nodiscard]] bool has_sampler() const override { return lambda_ == 0.0 || base_->has_sampler(); }
    [[nodiscard]] bool deterministic() const override { return lambda_ == 0.0 || base_->deterministic(); }
    [[nodiscard]] TransitionSampler sampler(double h) const override;

    [[nodiscard]] double lambda() const { return lambda_; }
    [[nodiscard]] const MemberPtr& base() const { return base_; }

private:
    MemberPtr base_;
    double lambda_;
};

}  // namespace nisio
