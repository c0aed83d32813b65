#include <doctest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "nisio/errors.hpp"
#include "nisio/zoo/chain.hpp"
#include "nisio/zoo/expression.hpp"
#include "nisio/zoo/gbm.hpp"
#include "nisio/zoo/heat.hpp"
#include "nisio/zoo/koopman.hpp"
#include "nisio/zoo/ou.hpp"
#include "nisio/zoo/scaled.hpp"
#include "nisio/zoo/stable.hpp"
#include "support.hpp"

using namespace nisio;

namespace {

GridPtr log_grid(double half_width, double dz) {
    return std::make_shared<const WeightedGrid>(WeightedGrid::log_symmetric(half_width, dz));
}

GridPtr plane(double lo, double hi, double step) {
    const auto n = static_cast<std::size_t>(std::lround((hi - lo) / step)) + 1;
    return std::make_shared<const WeightedGrid>(WeightedGrid::tensor({lo, step, n}, {lo, step, n}));
}

double max_err2(const GridFunction& u, const std::function<double(const State&)>& oracle, double r) {
    double e = 0;
    const auto& g = *u.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto s = g.state(i);
        if (std::abs(s[0]) <= r && std::abs(s[1]) <= r) e = std::max(e, std::abs(u[i] - oracle(s)));
    }
    return e;
}

double generator_err(const GeneratorResult& r, const std::function<double(double)>& oracle, double lo,
                     double hi) {
    double e = 0;
    const auto& g = *r.values.grid();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (r.valid[i] && g.x(i) >= lo && g.x(i) <= hi) e = std::max(e, std::abs(r.values[i] - oracle(g.x(i))));
    return e;
}

}  // namespace

TEST_CASE("heat: cosine decays at rate sigma^2/2") {
    auto g = fixtures::circle(1024);
    HeatMember h(g, {1.0});
    const auto u = h.apply(1.0, fixtures::f(g, [](double x) { return std::cos(x); }));
    CHECK(fixtures::max_err(u, [](double x) { return std::exp(-0.5) * std::cos(x); }, -4, 4) < 1e-6);
}

TEST_CASE("heat: quadratic gains sigma^2 t") {
    auto g = fixtures::line(-8, 8, 0.01);
    HeatMember h(g, {0.5});
    const auto u = h.apply(2.0, fixtures::f(g, [](double x) { return x * x; }));
    CHECK(fixtures::max_err(u, [](double x) { return x * x + 0.5; }, -3, 3) < 1e-10);
    CHECK_THROWS_AS(HeatMember(g, {-1.0}), ConfigError);
    CHECK(h.propagator(0.0).nonzeros() == g->size());
}

TEST_CASE("gbm: moments on the log-symmetric grid") {
    auto g = log_grid(4, 0.01);
    GBMMember m(g, {0.1, 0.2});
    const auto lin = m.apply(1.0, fixtures::f(g, [](double x) { return x; }));
    const auto sq = m.apply(1.0, fixtures::f(g, [](double x) { return x * x; }));
    double e1 = 0, e2 = 0;
    for (std::size_t i = 0; i < g->size(); ++i) {
        const double x = g->x(i), ax = std::abs(x);
        if (ax < 0.1 || ax > 10) continue;
        e1 = std::max(e1, std::abs(lin[i] - x * std::exp(0.1)) / ax);
        e2 = std::max(e2, std::abs(sq[i] - x * x * std::exp(0.24)) / (x * x));
    }
    CHECK(e1 < 1e-9);
    CHECK(e2 < 1e-9);
    CHECK(lin[g->zero_index()] == 0.0);
}

TEST_CASE("ou: degenerate and shifted cases in one dimension") {
    auto g = fixtures::line(-14, 14, 0.01);
    OUMember still(g, {1, {0.0}, {0.0}, {0.0}});
    const auto u = fixtures::f(g, [](double x) { return std::sin(3 * x); });
    CHECK(weighted_norm(still.apply(0.7, u) - u) == 0.0);

    OUMember drift(g, {1, {0.0}, {0.5}, {0.0}});
    CHECK(fixtures::max_err(drift.apply(1.0, fixtures::f(g, [](double x) { return x; })),
                            [](double x) { return x + 0.5; }, -4, 4) < 1e-12);

    OUMember noise(g, {1, {0.0}, {0.0}, {1.0}});
    CHECK(fixtures::max_err(noise.apply(1.0, fixtures::f(g, [](double x) { return x * x; })),
                            [](double x) { return x * x + 1; }, -2, 2) < 1e-9);

    OUMember pull(g, {1, {-1.0}, {0.0}, {0.0}});
    CHECK(fixtures::max_err(pull.apply(1.0, fixtures::f(g, [](double x) { return x; })),
                            [](double x) { return x * std::exp(-1.0); }, -4, 4) < 1e-12);
}

TEST_CASE("ou: two-dimensional mean and variance") {
    auto g = plane(-4, 4, 0.1);
    OUMember decay(g, {2, {-1, 0, 0, -0.5}, {0, 0}, {0, 0, 0, 0}});
    const auto lin = decay.apply(1.0, GridFunction::sample2(g, [](const State& s) { return s[0] + s[1]; }));
    CHECK(max_err2(lin, [](const State& s) { return std::exp(-1.0) * s[0] + std::exp(-0.5) * s[1]; }, 3) < 1e-12);

    OUMember diff(g, {2, {0, 0, 0, 0}, {0, 0}, {1, 0, 0, 1}});
    const auto sq = diff.apply(0.02, GridFunction::sample2(g, [](const State& s) { return s[0] * s[0] + s[1] * s[1]; }));
    CHECK(max_err2(sq, [](const State& s) { return s[0] * s[0] + s[1] * s[1] + 0.04; }, 2) < 1e-9);

    CHECK_THROWS_AS(OUMember(g, {2, {0, 0, 0, 0}, {0, 0}, {1, 2, 2, 1}}), ConfigError);
}

TEST_CASE("koopman: linear contraction and translation") {
    auto g = fixtures::line(-4, 4, 0.01);
    KoopmanMember shrink(g, {"-x", 1.0});
    CHECK(fixtures::max_err(shrink.apply(1.0, fixtures::f(g, [](double x) { return x; })),
                            [](double x) { return x * std::exp(-1.0); }, -4, 4) < 1e-8);
    KoopmanMember shift(g, {"1", 0.0});
    CHECK(fixtures::max_err(shift.apply(0.5, fixtures::f(g, [](double x) { return std::sin(x); })),
                            [](double x) { return std::sin(x + 0.5); }, -3, 3) < 1e-10);
    CHECK(shift.deterministic());
}

TEST_CASE("stable: Fourier multiplier on a mode") {
    auto g = fixtures::circle(512);
    StableMember s(g, {0.5});
    const auto u = s.apply(1.0, fixtures::f(g, [](double x) { return std::cos(2 * x); }));
    CHECK(fixtures::max_err(u, [](double x) { return std::exp(-2.0) * std::cos(2 * x); }, -4, 4) < 1e-6);
    CHECK_THROWS_AS(StableMember(g, {1.0}), ConfigError);
    CHECK_THROWS_AS(StableMember(fixtures::line(-1, 1, 0.1), {0.5}), ConfigError);
}

TEST_CASE("chain: two-state closed form and Eigen expm") {
    const double a = 0.7, b = 0.3, t = 1.3;
    auto g = fixtures::labels(2);
    ChainMember c(g, {2, {-a, a, b, -b}});
    const auto u = c.apply(t, GridFunction(g, std::vector<double>{1.0, 0.0}));
    const double e = std::exp(-(a + b) * t);
    CHECK(std::abs(u[0] - (b + a * e) / (a + b)) < 1e-12);
    CHECK(std::abs(u[1] - (b - b * e) / (a + b)) < 1e-12);

    Eigen::Matrix4d Q;
    Q << -3, 1, 2, 0, 0.5, -1, 0, 0.5, 0, 4, -6, 2, 1, 1, 1, -3;
    const Eigen::Matrix4d P = (Q * 2.5).exp();
    const Eigen::Matrix4d Qt = Q.transpose();  // row-major storage
    const std::vector<double> q(Qt.data(), Qt.data() + 16);
    auto g4 = fixtures::labels(4);
    const auto op = ChainMember(g4, {4, q}).propagator(2.5);
    for (std::size_t i = 0; i < 4; ++i) {
        std::vector<double> row(4, 0.0);
        for (std::size_t k = 0; k < op.row_cols(i).size(); ++k) row[op.row_cols(i)[k]] = op.row_weights(i)[k];
        for (int j = 0; j < 4; ++j) CHECK(std::abs(row[j] - P(i, j)) < 1e-12);
    }
}

TEST_CASE("chain: validation and the zero generator") {
    auto g = fixtures::labels(2);
    ChainMember idle(g, {2, {0, 0, 0, 0}});
    const GridFunction u(g, std::vector<double>{3.0, -1.0});
    CHECK(weighted_norm(idle.apply(5.0, u) - u) == 0.0);
    CHECK_THROWS_AS(ChainMember(g, {2, {-1, 1, -1, 1}}), ConfigError);
    CHECK_THROWS_AS(ChainMember(g, {2, {1, -1, 1, -1}}), ConfigError);
    CHECK_THROWS_AS(ChainMember(g, {2, {-1, 0.5, 0, 0}}), ConfigError);
    ChainMember leaky(g, {2, {-1, 0.5, 0, 0}}, false);
    CHECK_FALSE(leaky.conservative());
    CHECK_THROWS_AS(ChainMember(fixtures::labels(3), {2, {0, 0, 0, 0}}), ConfigError);
}

TEST_CASE("scaled: time dilation of a base member") {
    auto g = fixtures::circle(512);
    auto base = std::make_shared<HeatMember>(g, HeatSpec{1.0});
    const auto u = fixtures::f(g, [](double x) { return std::cos(x); });
    CHECK(weighted_norm(ScaledMember(base, 0.0).apply(1.0, u) - u) == 0.0);
    CHECK(weighted_norm(ScaledMember(base, 1.0).apply(0.3, u) - base->apply(0.3, u)) == 0.0);
    CHECK(fixtures::max_err(ScaledMember(base, 4.0).apply(0.25, u), [](double x) { return std::exp(-0.5) * std::cos(x); },
                            -4, 4) < 1e-6);
    CHECK_THROWS_AS(ScaledMember(base, -1.0), ConfigError);
    CHECK_THROWS_AS(ScaledMember(nullptr, 1.0), ConfigError);
    CHECK(ScaledMember(base, 0.0).deterministic());
}

TEST_CASE("generators on smooth data") {
    auto g = fixtures::line(-4, 4, 0.01);
    const auto cube = fixtures::f(g, [](double x) { return x * x * x; });
    CHECK(generator_err(HeatMember(g, {2.0}).generator(cube), [](double x) { return 12 * x; }, -3, 3) < 1e-8);
    CHECK(generator_err(KoopmanMember(g, {"x^2", 8}).generator(cube), [](double x) { return 3 * x * x * x * x; }, -3,
                        3) < 1e-3);
    CHECK(generator_err(OUMember(g, {1, {-1}, {1}, {2}}).generator(cube),
                        [](double x) { return 3 * x * x * (1 - x) + 6 * x; }, -3, 3) < 1e-3);

    auto lg = log_grid(3, 0.01);
    const auto sq = fixtures::f(lg, [](double x) { return x * x; });
    GBMMember gbm(lg, {0.1, 0.2});
    CHECK(generator_err(gbm.generator(sq), [](double x) { return 0.24 * x * x; }, -5, 5) < 1e-3);

    auto circle = fixtures::circle(256);
    CHECK(generator_err(StableMember(circle, {0.5}).generator(fixtures::f(circle, [](double x) { return std::sin(3 * x); })),
                        [](double x) { return -3 * std::sin(3 * x); }, -4, 4) < 1e-10);

    auto lab = fixtures::labels(2);
    const auto r = ChainMember(lab, {2, {-1, 1, 2, -2}}).generator(GridFunction(lab, std::vector<double>{1, 0}));
    CHECK(r.values[0] == -1.0);
    CHECK(r.values[1] == 2.0);
}

TEST_CASE("expression parser") {
    CHECK(Expression("2^3^2")(0) == 512.0);
    CHECK(Expression("-x^2")(3) == -9.0);
    CHECK(std::abs(Expression("sin(pi/2) + exp(0) * abs(-x)")(-2) - 3.0) < 1e-15);
    CHECK(Expression("tanh(0) + sqrt(4) / 2 - log(1)")(1) == 1.0);
    CHECK_THROWS_AS(Expression("x +"), ConfigError);
    CHECK_THROWS_AS(Expression("foo(x)"), ConfigError);
    CHECK_THROWS_AS(Expression("(x"), ConfigError);
}

TEST_CASE("stable: doubling the periodic domain leaves a smooth solution unchanged") {
    auto small = fixtures::circle(256, 2 * M_PI);
    auto big = fixtures::circle(512, 4 * M_PI);
    const auto u = [](double x) { return std::cos(x) + 0.5 * std::sin(3 * x); };
    const auto a = StableMember(small, {0.7}).apply(0.5, fixtures::f(small, u));
    const auto b = StableMember(big, {0.7}).apply(0.5, fixtures::f(big, u));
    double err = 0;
    for (std::size_t i = 0; i < small->size(); ++i) err = std::max(err, std::abs(a[i] - b[128 + i]));
    CHECK(std::abs(small->x(0) - big->x(128)) < 1e-12);
    CHECK(err < 1e-12);
}
