#include <doctest.h>

#include <omp.h>

#include "nisio/control.hpp"
#include "nisio/errors.hpp"
#include "nisio/mc.hpp"
#include "nisio/zoo/chain.hpp"
#include "nisio/zoo/gbm.hpp"
#include "nisio/zoo/heat.hpp"
#include "nisio/zoo/koopman.hpp"
#include "nisio/zoo/stable.hpp"
#include "support.hpp"

using namespace nisio;

namespace {

ControlPolicy constant_policy(std::size_t n, double t, unsigned m, std::int32_t member) {
    ControlPolicy p;
    for (unsigned k = 0; k < m; ++k) p.stages.push_back({t / m, std::vector<std::int32_t>(n, member)});
    return p;
}

double square(const State& s) { return s[0] * s[0]; }

}  // namespace

TEST_CASE("monte carlo is reproducible and independent of the thread count") {
    auto g = fixtures::line(-8, 8, 0.05);
    SemigroupFamily fam({std::make_shared<HeatMember>(g, HeatSpec{1.0})});
    SamplerSpec spec{&fam, constant_policy(g->size(), 1.0, 4, 0), 20000, 42};
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto a = mc_value(spec, {0.3, 0}, square);
    omp_set_num_threads(4);
    const auto b = mc_value(spec, {0.3, 0}, square);
    omp_set_num_threads(saved);
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_error == b.std_error);
    spec.seed = 43;
    CHECK(mc_value(spec, {0.3, 0}, square).estimate != a.estimate);
}

TEST_CASE("heat paths: E x^2 = x0^2 + sigma^2 t") {
    auto g = fixtures::line(-10, 10, 0.05);
    SemigroupFamily fam({std::make_shared<HeatMember>(g, HeatSpec{1.0})});
    SamplerSpec spec{&fam, constant_policy(g->size(), 1.0, 8, 0), 100000, 5};
    const auto r = mc_value(spec, {0.5, 0}, square);
    CHECK(r.paths == 100000);
    CHECK(std::abs(r.estimate - 1.25) < 4 * r.std_error);
    CHECK(r.std_error == doctest::Approx(std::sqrt(2.0 + 4 * 0.25) / std::sqrt(1e5)).epsilon(0.05));
}

TEST_CASE("constant payoffs and deterministic flows have zero variance") {
    auto g = fixtures::line(-4, 4, 0.01);
    SemigroupFamily heat({std::make_shared<HeatMember>(g, HeatSpec{1.0})});
    SamplerSpec spec{&heat, constant_policy(g->size(), 1.0, 4, 0), 1000, 1};
    const auto c = mc_value(spec, {0, 0}, [](const State&) { return 2.5; });
    CHECK(c.estimate == 2.5);
    CHECK(c.std_error == 0.0);

    SemigroupFamily flow({std::make_shared<KoopmanMember>(g, KoopmanSpec{"-x", 1})});
    SamplerSpec fspec{&flow, constant_policy(g->size(), 1.0, 4, 0), 1000, 1};
    const auto k = mc_value(fspec, {2, 0}, [](const State& s) { return s[0]; });
    CHECK(k.std_error == 0.0);
    CHECK(k.estimate == doctest::Approx(2 * std::exp(-1.0)).epsilon(1e-8));
}

TEST_CASE("gbm and chain samplers hit their means") {
    auto lg = std::make_shared<const WeightedGrid>(WeightedGrid::log_symmetric(4, 0.02));
    SemigroupFamily gbm({std::make_shared<GBMMember>(lg, GBMSpec{0.1, 0.3})});
    SamplerSpec gspec{&gbm, constant_policy(lg->size(), 1.0, 4, 0), 100000, 3};
    const auto r = mc_value(gspec, {1.0, 0}, [](const State& s) { return s[0]; });
    CHECK(std::abs(r.estimate - std::exp(0.1)) < 4 * r.std_error);

    auto lab = fixtures::labels(2);
    SemigroupFamily chain({std::make_shared<ChainMember>(lab, ChainSpec{2, {-1, 1, 2, -2}})});
    SamplerSpec cspec{&chain, constant_policy(2, 1.0, 2, 0), 100000, 4};
    const auto p = mc_value(cspec, {0, 0}, [](const State& s) { return s[0] == 0 ? 1.0 : 0.0; });
    // P_00(t) = 2/3 + 1/3 e^{-3t}
    CHECK(std::abs(p.estimate - (2.0 / 3 + std::exp(-3.0) / 3)) < 4 * p.std_error);
}

TEST_CASE("safety box clamps and counts paths") {
    auto g = fixtures::line(-1, 1, 0.05);
    SemigroupFamily fam({std::make_shared<HeatMember>(g, HeatSpec{1.0})});
    SamplerSpec spec{&fam, constant_policy(g->size(), 1.0, 4, 0), 2000, 8};
    const auto r = mc_value(spec, {0, 0}, square);
    CHECK(r.flagged > 0);
    CHECK(r.estimate <= 1.0);
    spec.box = SafetyBox{{-100, 0}, {100, 0}};
    CHECK(mc_value(spec, {0, 0}, square).flagged == 0);
}

TEST_CASE("monte carlo input validation") {
    auto g = fixtures::line(-1, 1, 0.05);
    SemigroupFamily fam({std::make_shared<HeatMember>(g, HeatSpec{1.0})});
    SamplerSpec spec{&fam, constant_policy(g->size(), 1.0, 2, 0), 99, 1};
    CHECK_THROWS_AS((void)mc_value(spec, {0, 0}, square), InvalidInput);
    SamplerSpec none{nullptr, {}, 1000, 1};
    CHECK_THROWS_AS((void)mc_value(none, {0, 0}, square), ConfigError);

    auto c = fixtures::circle(64);
    SemigroupFamily stable({std::make_shared<StableMember>(c, StableLevySpec{0.5})});
    SamplerSpec sspec{&stable, constant_policy(c->size(), 1.0, 2, 0), 1000, 1};
    CHECK_THROWS_AS((void)mc_value(sspec, {0, 0}, square), ConfigError);
}

TEST_CASE("comparison z-score against the grid value") {
    auto g = fixtures::line(-8, 8, 0.02, 4);
    SemigroupFamily fam({std::make_shared<HeatMember>(g, HeatSpec{0.5}), std::make_shared<HeatMember>(g, HeatSpec{1.0})});
    const auto u = fixtures::f(g, [](double x) { return x * x; });
    const auto gr = greedy_policy(fam, 1.0, u, 16);
    SamplerSpec spec{&fam, gr.policy, 50000, 12};
    const auto cmp = mc_compare(spec, u, square, {0, 0}, fixed_level(4));
    CHECK(cmp.grid == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cmp.nisio == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(cmp.z_score) < 4);
    CHECK(cmp.flagged == (std::abs(cmp.z_score) > 3));
    const auto j = cmp.to_json();
    CHECK(j.contains("z_score"));

    const GridFunction one(g, 1.0);
    const auto flat = mc_compare(spec, one, [](const State&) { return 1.0; }, {0, 0}, fixed_level(2));
    CHECK(flat.z_score == 0.0);
    CHECK_FALSE(flat.flagged);
}
