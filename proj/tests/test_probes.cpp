#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "nisio/errors.hpp"
#include "nisio/probes.hpp"
#include "support.hpp"

using namespace nisio;

TEST_CASE("probe formulas") {
    CHECK(smooth_bump(0.0) == 1.0);
    CHECK(smooth_bump(1.0) == 0.0);
    CHECK(smooth_bump(-1.5) == 0.0);
    CHECK(smooth_bump(0.5) == doctest::Approx(std::exp(1.0 - 1.0 / 0.75)));

    ProbeSpec call{"call"};
    call.strike = 1.0;
    CHECK(probe_function(call)({3.0, 0}) == 2.0);
    CHECK(probe_function(call)({0.5, 0}) == 0.0);
    CHECK(probe_function({"quadratic"})({1.0, 2.0}) == 5.0);
    CHECK(probe_function({"neg-quadratic"})({3.0, 0}) == -9.0);
    ProbeSpec c{"const"};
    c.value = -2.5;
    CHECK(probe_function(c)({7, 7}) == -2.5);
    ProbeSpec s{"sin"};
    s.frequency = 2;
    CHECK(probe_function(s)({0.25, 0}) == doctest::Approx(std::sin(0.5)));
    CHECK_THROWS_AS(probe_function({"csv"}), ConfigError);
    CHECK_THROWS_AS(probe_function({"wiggle"}), ConfigError);
}

TEST_CASE("csv probes must match the grid") {
    auto g = fixtures::line(0, 1, 0.5);
    const auto path = std::filesystem::temp_directory_path() / "nisio_probe_test.csv";
    std::ofstream(path) << "x,u\n0,1\n0.5,2\n1,4\n";
    ProbeSpec spec{"csv"};
    spec.csv_path = path.string();
    const auto u = make_probe(g, spec);
    CHECK(u[2] == 4.0);
    std::ofstream(path) << "0,1\n0.5,2\n";
    CHECK_THROWS_AS(make_probe(g, spec), ConfigError);
    std::ofstream(path) << "0,1\n0.6,2\n1,4\n";
    CHECK_THROWS_AS(make_probe(g, spec), ConfigError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(make_probe(g, spec), ConfigError);
}

TEST_CASE("evaluation interpolates on lines and snaps on labels") {
    auto g = fixtures::line(0, 2, 1);
    const GridFunction u(g, std::vector<double>{0, 10, 30});
    CHECK(evaluate(u, {0.5, 0}) == 5.0);
    CHECK(evaluate(u, {1.75, 0}) == 25.0);
    CHECK(evaluate(u, {5.0, 0}) == 30.0);
    auto lab = fixtures::labels(3);
    CHECK(evaluate(GridFunction(lab, std::vector<double>{1, 2, 3}), {2, 0}) == 3.0);
}
