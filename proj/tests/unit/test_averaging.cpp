#include <cmath>
#include <vector>

#include "doctest.h"
#include "sheetlab/averaging.hpp"
#include "sheetlab/rng.hpp"
#include "sheetlab/stats.hpp"

using namespace sheetlab;

TEST_CASE("drift functions enforce |b| <= 1 at construction") {
    CHECK_THROWS_AS(DriftFunction::constant(1.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(DriftFunction::constant(-2.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(
        DriftFunction::custom("too_big",
                              [](double, std::span<const double> x) { return 2.0 * x[0]; }, 1),
        std::invalid_argument);
    const DriftFunction floor_b = DriftFunction::floor_component(0, 1);
    const std::vector<double> probe{7.3};
    CHECK(floor_b(0.0, probe) == 1.0);  // clamped
    const std::vector<double> neg{-3.2};
    CHECK(floor_b(0.0, neg) == -1.0);
    const std::vector<double> mid{0.4};
    CHECK(floor_b(0.0, mid) == 0.0);
    CHECK_THROWS_AS(DriftFunction::by_name("no-such-drift", 1), std::invalid_argument);
}

TEST_CASE("box sets: measure, membership, disjointness") {
    Box b1{0.0, 0.5, {0.0}, {1.0}};
    Box b2{0.5, 1.0, {0.0}, {2.0}};
    const BoxSet u({b1, b2});
    CHECK(u.measure() == doctest::Approx(0.5 * 1.0 + 0.5 * 2.0));
    const std::vector<double> inside{0.5};
    CHECK(u.contains(0.25, inside));
    CHECK_FALSE(u.contains(0.25, std::vector<double>{1.5}));
    Box overlap{0.25, 0.75, {0.5}, {1.5}};
    CHECK_THROWS_AS(BoxSet({b1, overlap}), std::invalid_argument);
}

TEST_CASE("dyadic intervals respect the grid resolution") {
    GridSpec g(4, 96);  // 96 = 2^5 * 3: max dyadic level 5
    const TInterval ok = TInterval::dyadic(g, 5, 31);
    CHECK(ok.j_hi - ok.j_lo == 3);
    CHECK_THROWS_WITH_AS(TInterval::dyadic(g, 6, 0), doctest::Contains("max feasible level 5"),
                         std::invalid_argument);
    CHECK_THROWS_AS(TInterval::dyadic(g, 3, 8), std::invalid_argument);  // k out of range
}

TEST_CASE("averaging transform: constants, zero, and the uniform bound") {
    const SheetPath p = SheetPath::sample(GridSpec(4, 64), 1, 11);
    const TInterval I = TInterval::from_times(p.grid(), 0.25, 0.75);
    const std::vector<double> x{0.3};
    CHECK(averaging_transform(DriftFunction::constant(0.8, 1), p, I, 2, x) ==
          doctest::Approx(0.8 * 0.5).epsilon(1e-12));
    CHECK(averaging_transform(DriftFunction::constant(0.0, 1), p, I, 2, x) == 0.0);

    // |T_I[b]| <= |I| for every b with |b| <= 1, by construction
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const SheetPath q = SheetPath::sample(GridSpec(4, 64), 1, seed);
        const DriftFunction b = DriftFunction::random_step(seed, 8, 3.0, 1);
        const double val = averaging_transform(b, q, I, 3, x);
        CHECK(std::abs(val) <= I.length(q.grid()) + 1e-12);
    }
}

TEST_CASE("interval additivity of the transform is exact") {
    const SheetPath p = SheetPath::sample(GridSpec(2, 128), 1, 321);
    const DriftFunction b = DriftFunction::sign_component(0, 1);
    const std::vector<double> x{-0.2};
    const TInterval ab = TInterval::from_times(p.grid(), 0.0, 0.5);
    const TInterval bc = TInterval::from_times(p.grid(), 0.5, 1.0);
    const TInterval ac = TInterval::from_times(p.grid(), 0.0, 1.0);
    const double split = averaging_transform(b, p, ab, 1, x) + averaging_transform(b, p, bc, 1, x);
    CHECK(averaging_transform(b, p, ac, 1, x) == doctest::Approx(split).epsilon(1e-13));
}

TEST_CASE("transform of a symmetric threshold drift averages to 1/2") {
    // b = 1{x > 0}: by symmetry of the sheet, E T_[0,1][b](1, 0) = 1/2.
    const DriftFunction b = DriftFunction::custom(
        "half_indicator", [](double, std::span<const double> x) { return x[0] > 0.0 ? 1.0 : 0.0; },
        1);
    RunningStats acc;
    const std::vector<double> origin{0.0};
    for (std::uint64_t r = 0; r < 10000; ++r) {
        const SheetPath p = SheetPath::sample(GridSpec(1, 64), 1, derive_seed(61, r));
        acc.add(averaging_transform(b, p, TInterval{0, 64}, 1, origin));
    }
    CHECK(std::abs(acc.mean() - 0.5) < 3.0 * acc.standard_error());
}

TEST_CASE("rho: coincident points, constant drifts, uniform bound, additivity") {
    const SheetPath p = SheetPath::sample(GridSpec(4, 64), 1, 17);
    const DriftFunction fb = DriftFunction::floor_component(0, 1);
    const std::vector<double> x{0.1}, x2{0.6}, x3{-0.4};
    CHECK(rho(fb, p, 3, 2, 2, x, 2, x) == 0.0);
    CHECK(rho(DriftFunction::constant(0.7, 1), p, 3, 2, 1, x, 3, x2) == 0.0);

    for (std::uint32_t k = 0; k < 8; ++k) {
        CHECK(std::abs(rho(fb, p, 3, k, 1, x, 3, x2)) <= 2.0 * std::pow(2.0, -3.0) + 1e-12);
    }
    // additivity along intermediate points, up to float reassociation
    const double direct = rho(fb, p, 2, 1, 1, x, 4, x3);
    const double chained = rho(fb, p, 2, 1, 1, x, 2, x2) + rho(fb, p, 2, 1, 2, x2, 4, x3);
    CHECK(direct == doctest::Approx(chained).epsilon(1e-12));
}

TEST_CASE("statistics are invariant under adding a constant to the drift") {
    const SheetPath p = SheetPath::sample(GridSpec(4, 64), 1, 23);
    const DriftFunction base = DriftFunction::custom(
        "half_sign", [](double, std::span<const double> x) { return 0.5 * (x[0] > 0 ? 1 : -1); },
        1);
    const DriftFunction shifted = DriftFunction::custom(
        "half_sign_shifted",
        [](double, std::span<const double> x) { return 0.5 * (x[0] > 0 ? 1 : -1) + 0.25; }, 1);
    const std::vector<double> x{0.0}, x2{0.3};
    CHECK(rho(base, p, 2, 1, 1, x, 3, x2) ==
          doctest::Approx(rho(shifted, p, 2, 1, 1, x, 3, x2)).epsilon(1e-12));
}

TEST_CASE("exponential moments: exact trivial rows and a bounded sign case") {
    DavieGridParams params;
    params.grid = GridSpec(1, 256);
    params.master_seed = 99;
    const std::vector<double> y{0.1};
    const std::vector<double> ladder{0.0, 0.05, 0.1};

    const DavieReport zero = exp_moment_estimate(DriftFunction::constant(0.0, 1), 200, 0.0, 0.5,
                                                 1.0, 1.0, y, ladder, params);
    for (const MomentLadderRow& row : zero.ladder) CHECK(row.moment == 1.0);

    const DavieReport sgn = exp_moment_estimate(DriftFunction::sign_component(0, 1), 2000, 0.0,
                                                0.5, 1.0, 1.0, y, ladder, params);
    CHECK(sgn.ladder[0].moment == 1.0);  // alpha = 0
    for (const MomentLadderRow& row : sgn.ladder) {
        CHECK(std::isfinite(row.moment));
        CHECK(row.moment < 10.0);
    }
    CHECK(sgn.largest_stable_alpha >= 0.05);

    CHECK_THROWS_AS(exp_moment_estimate(DriftFunction::constant(0.0, 1), 0, 0.0, 0.5, 1.0, 1.0, y,
                                        ladder, params),
                    std::invalid_argument);
}

TEST_CASE("tail curve: zero drift, cutoff, monotone counts") {
    DavieGridParams params;
    params.grid = GridSpec(4, 256);
    params.master_seed = 12;
    const std::vector<double> x{0.0}, x2{0.25};
    std::vector<double> etas;
    for (int i = 1; i <= 20; ++i) etas.push_back(0.08 * i);

    const DavieReport zero = tail_curve(DriftFunction::constant(0.0, 1), 500, 0.0, 0.25, 0.5,
                                        0.75, x, x2, etas, params);
    for (const TailCurveRow& row : zero.tail) CHECK(row.p_hat == 0.0);

    const DavieReport fl = tail_curve(DriftFunction::floor_component(0, 1), 4000, 0.0, 0.25, 0.5,
                                      0.75, x, x2, etas, params);
    for (std::size_t i = 1; i < fl.tail.size(); ++i) {
        CHECK(fl.tail[i].p_hat <= fl.tail[i - 1].p_hat);  // nonincreasing in eta
    }
    for (const TailCurveRow& row : fl.tail) {
        if (row.eta > fl.eta_cutoff) CHECK(row.count == 0);
    }
    CHECK(fl.fit_done);
    CHECK(fl.tail_fit.slope < 0.0);
}

TEST_CASE("modulus scan: constant drift gives exactly zero") {
    GridSpec grid(256, 64);  // 256 = 4^4
    const SheetPath p = SheetPath::sample(grid, 1, 5);
    ModulusScanParams params;
    params.depth = 4;
    params.level_max = 3;
    params.quadruples = 200;
    CHECK(modulus_scan(DriftFunction::constant(0.9, 1), p, params) == 0.0);
    const double c0 = modulus_scan(DriftFunction::floor_component(0, 1), p, params);
    CHECK(c0 > 0.0);
    CHECK(std::isfinite(c0));
}

TEST_CASE("interval modulus ratios respect the deterministic single-cell bound") {
    GridSpec grid(16, 16);
    const SheetPath p = SheetPath::sample(grid, 1, 31);
    const DriftFunction b = DriftFunction::floor_component(0, 1);
    const TInterval cell{0, 1};  // one grid cell
    PointPair pair;
    pair.s_node = 4;
    pair.s2_node = 12;
    pair.x = {0.0};
    pair.x2 = {0.5};
    const IntervalModulusResult res = interval_modulus_check(b, p, cell, {pair});
    const double len = cell.length(grid);
    const double dist = 0.5 + std::sqrt(grid.s(12) - grid.s(4));
    const double bound = 2.0 * len * std::sqrt(grid.s(4)) /
                         (std::sqrt(len) * (1.0 + log_plus(1.0 / (dist * len))) * dist);
    CHECK(res.max_ratio <= bound + 1e-12);

    const IntervalModulusResult zero =
        interval_modulus_check(DriftFunction::constant(0.3, 1), p, cell, {pair});
    CHECK(zero.max_ratio == 0.0);
}

TEST_CASE("occupation of open sets: empty, full, and a genuine box") {
    GridSpec grid(4, 128);
    const SheetPath p = SheetPath::sample(grid, 1, 41);
    std::vector<std::uint32_t> s_nodes{1, 2, 3, 4};
    std::vector<std::vector<double>> xs{{-0.5}, {0.0}, {0.5}};

    const BoxSet empty(std::vector<Box>{});
    CHECK(occupation_open_set(empty, p, s_nodes, xs) == 0.0);

    // U covering [0,1] x R: indicator is 1 at every quadrature node, so the
    // maximum is sqrt(s)*1 at s = 1 exactly.
    const BoxSet full({Box{-0.5, 1.5, {-1e9}, {1e9}}});
    CHECK(occupation_open_set(full, p, s_nodes, xs) == doctest::Approx(1.0).epsilon(1e-12));

    const BoxSet thin({Box{0.0, 1.0, {0.0}, {0.125}}});
    const double occ = occupation_open_set(thin, p, s_nodes, xs);
    CHECK(occ >= 0.0);
    CHECK(occ <= 1.0);
}

TEST_CASE("regularization probe: constant sequences and Lipschitz drifts") {
    GridSpec grid(1024, 256);
    const SheetPath p = SheetPath::sample(grid, 1, 51);
    const std::uint32_t s_node = 512;
    const std::vector<double> x{0.3};

    std::vector<PointPair> constant_seq(5);
    for (auto& step : constant_seq) {
        step.s_node = s_node;
        step.x = x;
        step.x2 = x;
    }
    const DriftFunction fb = DriftFunction::floor_component(0, 1);
    const RegularizationTable flat = regularization_probe(fb, p, s_node, x, constant_seq);
    for (const RegularizationStep& step : flat.steps) CHECK(step.difference == 0.0);
    CHECK(flat.pass);

    // Lipschitz drift: differences shrink with the approach distance.
    const DriftFunction lip = DriftFunction::custom(
        "clamp", [](double, std::span<const double> xv) { return std::clamp(xv[0], -1.0, 1.0); },
        1);
    std::vector<PointPair> seq;
    for (std::uint32_t q = 1; q <= 9; ++q) {
        PointPair step;
        const std::uint32_t off = std::max<std::uint32_t>(1024u >> (2 * q), 0u);
        step.s_node = s_node + off;
        step.x = {x[0] + std::pow(2.0, -static_cast<double>(q))};
        step.x2 = step.x;
        seq.push_back(step);
    }
    const RegularizationTable table = regularization_probe(lip, p, s_node, x, seq);
    CHECK(table.steps.back().difference < 1e-2);
    CHECK(table.pass);
}

TEST_CASE("counterexample: limit 0, value 1, interior integral 0") {
    const CounterexampleResult res = counterexample_demo(1000000, 1024);
    CHECK(res.value_at_1 == 1.0);
    CHECK(res.limit_estimate <= 1e-6);
    for (const auto& [s, integral] : res.table) {
        CHECK(integral == 0.0);  // 0 <= w < 1 pointwise for every s < 1, t > 0
        (void)s;
    }
}
