#include <doctest.h>

#include <cmath>

#include "tfzc/channel.hpp"
#include "tfzc/zc.hpp"

using namespace tfzc;

namespace {
DDChannelConfig small_config() {
    DDChannelConfig c;
    c.delay_bins = 4;
    c.doppler_bins = 2;
    c.t_step = 1.0e-6;
    c.delta_f = 100.0;
    c.alpha = PhaseCoupling::from_grid(100.0, 1.0e-6);
    return c;
}
}  // namespace

TEST_CASE("pdp: zero before the LoS delay, exponential after") {
    CHECK(pdp(25e-6, 50e-6, 123.0) == 0.0);
    CHECK(pdp(60e-6, 50e-6, 0.0) == 1.0);
    CHECK(pdp(50e-6, 0.0, 1e4) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(pdp(50e-6, 0.0, 1e4) == doctest::Approx(0.6065306597).epsilon(1e-9));
    CHECK_THROWS_AS(pdp(1.0, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("snap_to_bin rounds to nearest with ties toward zero") {
    CHECK(snap_to_bin(2.4, 1.0) == 2);
    CHECK(snap_to_bin(2.6, 1.0) == 3);
    CHECK(snap_to_bin(2.5, 1.0) == 2);
    CHECK(snap_to_bin(-2.5, 1.0) == -2);
    CHECK(snap_to_bin(-2.6, 1.0) == -3);
    CHECK(snap_to_bin(0.5, 1.0) == 0);
    CHECK(snap_to_bin(-0.5, 1.0) == 0);
    CHECK(snap_to_bin(19.52e-6, 0.5e-6) == 39);
}

TEST_CASE("config invariant violations are rejected") {
    auto c = small_config();
    c.kappa = 1.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config();
    c.tau_los = 10e-6;  // beyond (K-1)T = 3us
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config();
    c.nu_los = 10000.0;  // beyond 2*100 Hz
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config();
    c.beta = -1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("kappa=1 gives a single deterministic LoS tap") {
    auto c = small_config();
    c.kappa = 1.0;
    c.tau_los = 2.2e-6;   // snaps to bin 2
    c.nu_los = -120.0;    // snaps to bin -1
    c.beta = 2e5;
    Rng rng(1234);
    const DDChannel h = sample_channel(c, rng);
    CHECK(h.los_index == GridIndex{-1, 2});
    int nonzero = 0;
    for (int l = -2; l <= 2; ++l)
        for (int k = 0; k <= 3; ++k)
            if (h.grid.at(l, k) != cxd{}) ++nonzero;
    CHECK(nonzero == 1);
    CHECK(std::abs(h.grid.at(-1, 2)) ==
          doctest::Approx(std::exp(-c.beta * 2.0 * c.t_step)).epsilon(1e-12));
}

TEST_CASE("NLoS taps are CN(0, P(kT)): empirical variances within 5%") {
    auto c = small_config();
    c.kappa = 0.0;
    c.tau_los = 0.0;
    c.normalize_nlos = false;

    SUBCASE("flat profile (beta = 0)") {
        c.beta = 0.0;
        const int draws = 10000;
        double acc = 0.0;
        Rng rng(777);
        for (int i = 0; i < draws; ++i) {
            const DDChannel h = sample_channel(c, rng);
            acc += std::norm(h.grid.at(1, 1));
        }
        CHECK(acc / draws == doctest::Approx(1.0).epsilon(0.05));
    }

    SUBCASE("exponential profile") {
        c.beta = 3e5;
        const int draws = 10000;
        double acc0 = 0.0, acc3 = 0.0;
        Rng rng(778);
        for (int i = 0; i < draws; ++i) {
            const DDChannel h = sample_channel(c, rng);
            acc0 += std::norm(h.grid.at(-2, 1));
            acc3 += std::norm(h.grid.at(0, 3));
        }
        CHECK(acc0 / draws == doctest::Approx(std::exp(-c.beta * 1e-6)).epsilon(0.05));
        CHECK(acc3 / draws == doctest::Approx(std::exp(-c.beta * 3e-6)).epsilon(0.05));
    }
}

TEST_CASE("taps before the snapped LoS delay are zero for every seed") {
    auto c = small_config();
    c.kappa = 0.3;
    c.tau_los = 2.2e-6;  // snapped LoS bin 2
    for (uint64_t seed : {1ull, 2ull, 3ull, 99ull}) {
        Rng rng(seed);
        const DDChannel h = sample_channel(c, rng);
        for (int l = -2; l <= 2; ++l)
            for (int k = 0; k < 2; ++k) CHECK(h.grid.at(l, k) == cxd{});
        // and the LoS row itself carries the deterministic tap
        CHECK(std::abs(h.grid.at(h.los_index.row, h.los_index.col)) > 0.0);
    }
}

TEST_CASE("identical seeds replay bit-identically") {
    auto c = small_config();
    c.kappa = 0.4;
    Rng a(2024), b(2024);
    const DDChannel ha = sample_channel(c, a);
    const DDChannel hb = sample_channel(c, b);
    REQUIRE(ha.grid.raw().size() == hb.grid.raw().size());
    for (size_t i = 0; i < ha.grid.raw().size(); ++i) CHECK(ha.grid.raw()[i] == hb.grid.raw()[i]);

    const auto x = separable_zc(3, 3, 1, 1, c.delta_f, c.t_step);
    Rng na(55), nb(55);
    const auto ya = apply_channel(ha, x, 3.0, na);
    const auto yb = apply_channel(hb, x, 3.0, nb);
    for (size_t i = 0; i < ya.raw().size(); ++i) CHECK(ya.raw()[i] == yb.raw()[i]);
}

TEST_CASE("normalized NLoS carries expected total power 1-kappa^2") {
    auto c = small_config();
    c.normalize_nlos = true;
    c.beta = 4e5;
    c.kappa = 0.6;
    c.tau_los = 1.0e-6;
    const int draws = 4000;
    double total = 0.0;
    Rng rng(31337);
    for (int i = 0; i < draws; ++i) {
        const DDChannel h = sample_channel(c, rng);
        double e = energy(h.grid);
        e -= std::norm(h.grid.at(h.los_index.row, h.los_index.col));  // remove LoS power
        total += e;
    }
    CHECK(total / draws == doctest::Approx(1.0 - 0.36).epsilon(0.05));
}

TEST_CASE("LoS part scales linearly in kappa") {
    auto c = small_config();
    c.tau_los = 1.4e-6;
    c.beta = 1e5;
    for (double kappa : {0.2, 0.5, 0.9}) {
        c.kappa = kappa;
        Rng rng(7);
        const DDChannel h = sample_channel(c, rng);
        // NLoS at the LoS cell is zeroed, so the cell is exactly kappa * P
        CHECK(std::abs(h.grid.at(h.los_index.row, h.los_index.col)) ==
              doctest::Approx(kappa * std::exp(-c.beta * h.los_index.col * c.t_step))
                  .epsilon(1e-12));
    }
}

TEST_CASE("apply_channel: identity channel returns the pilot exactly") {
    auto c = small_config();
    c.kappa = 1.0;
    c.tau_los = 0.0;
    c.nu_los = 0.0;
    c.beta = 0.0;
    Rng rng(5);
    const DDChannel h = sample_channel(c, rng);
    REQUIRE(h.los_index == GridIndex{0, 0});
    const auto x = separable_zc(3, 5, 1, 1, c.delta_f, c.t_step);
    Rng noise_rng(6);
    const auto y = apply_channel(h, x, std::numeric_limits<double>::infinity(), noise_rng);
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 5; ++n) CHECK(y.at(m, n) == x.at(m, n));
}

TEST_CASE("apply_channel: single off-origin tap shifts and rotates the pilot") {
    auto c = small_config();
    c.kappa = 1.0;
    c.tau_los = 2.0e-6;
    c.nu_los = 200.0;
    c.beta = 5e4;
    Rng rng(9);
    const DDChannel h = sample_channel(c, rng);
    const int l0 = h.los_index.row, k0 = h.los_index.col;
    const cxd a = h.grid.at(l0, k0);
    const auto x = separable_zc(3, 3, 1, 1, c.delta_f, c.t_step);
    Rng noise_rng(10);
    const auto y = apply_channel(h, x, std::numeric_limits<double>::infinity(), noise_rng);
    for (int m = y.rows().lo; m <= y.rows().hi; ++m)
        for (int n = y.cols().lo; n <= y.cols().hi; ++n) {
            const cxd want = a * x.at(m - l0, n - k0) *
                             std::polar(1.0, 2.0 * M_PI * c.alpha.alpha * (m - l0) * k0);
            CHECK(std::abs(y.at(m, n) - want) < 1e-12);
        }
}

TEST_CASE("apply_channel: noise-only variance matches 1/SNR within 5%") {
    DDChannelConfig c;
    c.delay_bins = 100;
    c.doppler_bins = 49;
    c.one_sided_doppler = true;  // 50x100 grid of zeros
    c.t_step = 1e-6;
    c.delta_f = 10.0;
    c.kappa = 0.0;
    c.beta = 0.0;
    DDChannel h;
    h.grid = ComplexGrid(c.doppler_range(), c.delay_range(), c.delta_f, c.t_step);
    h.config = c;
    const auto x = ComplexGrid::delta(0, 0, c.delta_f, c.t_step);
    Rng rng(424242);
    const auto y = apply_channel(h, x, 0.0, rng);  // SNR = 0 dB -> variance 1
    REQUIRE(y.cell_count() == 5000);
    double acc = 0.0;
    for (const cxd& v : y.raw()) acc += std::norm(v);
    CHECK(acc / double(y.cell_count()) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("output support is the Minkowski sum of channel and pilot supports") {
    auto c = small_config();
    Rng rng(3);
    const DDChannel h = sample_channel(c, rng);
    const auto x = separable_zc(3, 5, 1, 1, c.delta_f, c.t_step);
    Rng noise_rng(4);
    const auto y = apply_channel(h, x, 10.0, noise_rng);
    CHECK(y.rows().lo == h.grid.rows().lo + x.rows().lo);
    CHECK(y.rows().hi == h.grid.rows().hi + x.rows().hi);
    CHECK(y.cols().lo == h.grid.cols().lo + x.cols().lo);
    CHECK(y.cols().hi == h.grid.cols().hi + x.cols().hi);
}
