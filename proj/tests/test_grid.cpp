#include <doctest.h>

#include "tfzc/grid.hpp"
#include "tfzc/grid_io.hpp"
#include "tfzc/rng.hpp"

using namespace tfzc;

TEST_CASE("zero extension outside declared ranges") {
    ComplexGrid g({-1, 1}, {0, 2}, 1.0, 1.0);
    g.ref(0, 1) = {1.5, -0.5};
    CHECK(g.at(0, 1) == cxd{1.5, -0.5});
    CHECK(g.at(5, 5) == cxd{0.0, 0.0});
    CHECK(g.at(-2, 0) == cxd{0.0, 0.0});
    CHECK(g.at(0, 3) == cxd{0.0, 0.0});
}

TEST_CASE("grid rejects non-positive bin sizes") {
    CHECK_THROWS_AS(ComplexGrid({0, 1}, {0, 1}, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ComplexGrid({0, 1}, {0, 1}, 1.0, -2.0), std::invalid_argument);
}

TEST_CASE("energy: zero grid, single entry, translation invariance") {
    ComplexGrid zero({0, 2}, {0, 2}, 1.0, 1.0);
    CHECK(energy(zero) == 0.0);

    ComplexGrid one = ComplexGrid::delta(0, 0);
    CHECK(energy(one) == 1.0);

    Rng rng(7);
    ComplexGrid g({-2, 3}, {-1, 4}, 2.0, 0.5);
    for (int l = -2; l <= 3; ++l)
        for (int k = -1; k <= 4; ++k) g.ref(l, k) = rng.complex_gaussian(1.0);
    const double e = energy(g);
    for (GridIndex s : {GridIndex{0, 0}, GridIndex{2, 3}, GridIndex{-5, 7}}) {
        CHECK(energy(translate(g, s)) == e);
    }
}

TEST_CASE("translate moves ranges, round-trips, keeps values") {
    ComplexGrid d = ComplexGrid::delta(0, 0);
    ComplexGrid moved = translate(d, {2, 3});
    CHECK(moved.at(2, 3) == cxd{1.0, 0.0});
    CHECK(moved.at(0, 0) == cxd{0.0, 0.0});
    CHECK(moved.rows().lo == 2);
    CHECK(moved.cols().lo == 3);

    ComplexGrid back = translate(moved, {-2, -3});
    CHECK(back.rows() == d.rows());
    CHECK(back.cols() == d.cols());
    for (int l = back.rows().lo; l <= back.rows().hi; ++l)
        for (int k = back.cols().lo; k <= back.cols().hi; ++k) CHECK(back.at(l, k) == d.at(l, k));

    ComplexGrid same = translate(d, {0, 0});
    CHECK(same.rows() == d.rows());
    CHECK(same.at(0, 0) == d.at(0, 0));
}

TEST_CASE("grid dump round-trips exactly") {
    Rng rng(11);
    ComplexGrid g({-2, 1}, {3, 6}, 37.5, 1.25e-6);
    for (int l = -2; l <= 1; ++l)
        for (int k = 3; k <= 6; ++k) g.ref(l, k) = rng.complex_gaussian(2.0);
    g.ref(0, 4) = {1.0, 0.0};
    g.ref(1, 3) = {-0.25, -3.5e-9};

    const std::string path = "test_grid_dump.tmp.grid";
    write_grid_dump(g, path);
    ComplexGrid r = read_grid_dump(path);
    CHECK(r.rows() == g.rows());
    CHECK(r.cols() == g.cols());
    CHECK(r.delta_f() == doctest::Approx(g.delta_f()).epsilon(1e-12));
    CHECK(r.delta_t() == doctest::Approx(g.delta_t()).epsilon(1e-12));
    for (int l = -2; l <= 1; ++l)
        for (int k = 3; k <= 6; ++k) {
            CHECK(r.at(l, k).real() == doctest::Approx(g.at(l, k).real()).epsilon(1e-8));
            CHECK(r.at(l, k).imag() == doctest::Approx(g.at(l, k).imag()).epsilon(1e-8));
        }
    std::remove(path.c_str());
}

TEST_CASE("dump header format") {
    ComplexGrid g({-1, 1}, {0, 1}, 10.0, 5e-7);
    const std::string dump = grid_dump_string(g);
    CHECK(dump.rfind("# rows=[-1,1] cols=[0,1] delta_f=10 delta_t=5e-07\n", 0) == 0);
}

TEST_CASE("complex sample parser: exponent signs, malformed tokens") {
    CHECK(parse_complex("1e-5+2e-6j") == cxd{1e-5, 2e-6});
    CHECK(parse_complex("-1.5-2j") == cxd{-1.5, -2.0});
    CHECK(parse_complex("1.5E+10-2E+3j") == cxd{1.5e10, -2e3});
    CHECK(parse_complex("0+0j") == cxd{0.0, 0.0});
    CHECK_THROWS_AS(parse_complex("1.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_complex("j"), std::invalid_argument);
    CHECK_THROWS_AS(parse_complex("1.5+abcj"), std::invalid_argument);

    // exact formatting round-trips any double
    for (double v : {0.1, -0.0, 1e300, 5e-324, 37.5, 8.0943963660000002e9})
        CHECK(parse_double(format_exact(v)) == v);
}
