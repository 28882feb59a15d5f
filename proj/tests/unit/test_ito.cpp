#include <cmath>
#include <vector>

#include "doctest.h"
#include "sheetlab/ito.hpp"
#include "sheetlab/rng.hpp"
#include "sheetlab/stats.hpp"

using namespace sheetlab;

namespace {

// Quadruple-loop oracle: sum over ordered cell pairs with u < v, xi > zeta.
double j_brute_force(const SheetPath& p, std::uint32_t component, std::uint32_t i_max,
                     std::uint32_t j_max) {
    auto cell = [&](std::uint32_t i, std::uint32_t j) {
        return p.at(i, j, component) - p.at(i - 1, j, component) - p.at(i, j - 1, component) +
               p.at(i - 1, j - 1, component);
    };
    double acc = 0.0;
    for (std::uint32_t u = 1; u <= i_max; ++u)
        for (std::uint32_t xi = 1; xi <= j_max; ++xi)
            for (std::uint32_t v = 1; v <= i_max; ++v)
                for (std::uint32_t zeta = 1; zeta <= j_max; ++zeta)
                    if (u < v && xi > zeta) acc += cell(u, xi) * cell(v, zeta);
    return acc;
}

const RandomIntegrand& battery_entry(const std::vector<RandomIntegrand>& battery,
                                     const std::string& name) {
    for (const auto& h : battery) {
        if (h.name == name) return h;
    }
    throw std::logic_error("battery entry missing: " + name);
}

}  // namespace

TEST_CASE("J vanishes on degenerate grids and on the boundary") {
    const SheetPath p1 = SheetPath::sample(GridSpec(1, 1), 1, 3);
    const JField j1(p1, 0);
    CHECK(j1.at(1, 1) == 0.0);  // no ordered pair of distinct cells

    const SheetPath p = SheetPath::sample(GridSpec(5, 5), 1, 4);
    const JField j(p, 0);
    for (std::uint32_t i = 0; i <= 5; ++i) {
        CHECK(j.at(i, 0) == 0.0);
        CHECK(j.at(0, i) == 0.0);
    }
}

TEST_CASE("2x2 J is the single admissible cell-pair product") {
    const SheetPath p = SheetPath::sample(GridSpec(2, 2), 1, 5);
    const JField j(p, 0);
    auto cell = [&](std::uint32_t i, std::uint32_t jj) {
        return p.at(i, jj) - p.at(i - 1, jj) - p.at(i, jj - 1) + p.at(i - 1, jj - 1);
    };
    CHECK(j.at(2, 2) == doctest::Approx(cell(1, 2) * cell(2, 1)).epsilon(1e-13));
}

TEST_CASE("incremental J build equals the quadruple-loop oracle") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const std::uint32_t m = 2 + static_cast<std::uint32_t>(seed % 31);
        const std::uint32_t n = 2 + static_cast<std::uint32_t>((3 * seed) % 31);
        const SheetPath p = SheetPath::sample(GridSpec(m, n), 1, seed);
        const JField j(p, 0);
        for (std::uint32_t i : {m / 2, m}) {
            for (std::uint32_t jj : {n / 2, n}) {
                if (i == 0 || jj == 0) continue;
                const double oracle = j_brute_force(p, 0, i, jj);
                CHECK(j.at(i, jj) == doctest::Approx(oracle).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("J is centered") {
    RunningStats acc;
    for (std::uint64_t r = 0; r < 10000; ++r) {
        const SheetPath p = SheetPath::sample(GridSpec(8, 8), 1, derive_seed(51, r));
        acc.add(JField(p, 0).at(8, 8));
    }
    CHECK(std::abs(acc.mean()) < 3.0 * acc.standard_error());
}

TEST_CASE("identity residuals vanish at machine precision for the exact family") {
    const std::vector<RandomIntegrand> battery = ito_test_battery();
    for (std::uint64_t seed : {1ull, 2ull, 77ull}) {
        const SheetPath p = SheetPath::sample(GridSpec(32, 32), 1, seed);
        for (const char* name : {"one", "x", "xt_mod"}) {
            const ItoTerms terms = ito_residual(battery_entry(battery, name), p, 0, 32, 32);
            CHECK(std::abs(terms.residual_frozen) < 1e-11);
        }
    }
}

TEST_CASE("identity residuals are centred for the quadratic family") {
    const std::vector<RandomIntegrand> battery = ito_test_battery();
    for (const char* name : {"x2", "sx", "sx2"}) {
        RunningStats acc;
        for (std::uint64_t r = 0; r < 150; ++r) {
            const SheetPath p = SheetPath::sample(GridSpec(64, 64), 1, derive_seed(52, r));
            acc.add(ito_residual(battery_entry(battery, name), p, 0, 64, 64).residual_frozen);
        }
        INFO(name);
        CHECK(std::abs(acc.mean()) <= 3.0 * acc.standard_error());
    }
}

TEST_CASE("frozen and running readings of the l2 term coincide when hxx is x-free") {
    const std::vector<RandomIntegrand> battery = ito_test_battery();
    const SheetPath p = SheetPath::sample(GridSpec(32, 32), 1, 8);
    // hxx constant in x: both readings integrate the same deterministic field
    const ItoTerms x2 = ito_residual(battery_entry(battery, "x2"), p, 0, 32, 32);
    CHECK(x2.l2_frozen == doctest::Approx(x2.l2_running).epsilon(1e-12));
    // hxx = 6x: the readings genuinely differ and both are reported
    const ItoTerms x3 = ito_residual(battery_entry(battery, "x3"), p, 0, 32, 32);
    CHECK(x3.residual_running != x3.residual_frozen);
}

TEST_CASE("adapted reads pass the guard and evaluate everywhere") {
    // Path-dependent coefficients are legitimate as long as every read stays
    // inside [0,s] x [0,t]; reads at (s/2, t/2) never trip the guard across
    // the whole evaluation sweep of the residual.
    RandomIntegrand h;
    h.name = "x_scaled_by_past";
    const auto zero = [](double, double, const AdaptedPathView&, double) { return 0.0; };
    auto past_factor = [](double s, double t, const AdaptedPathView& w) {
        const GridSpec& g = w.path().grid();
        const double s_half = g.s(g.s_index(s) / 2);
        const double t_half = g.t(g.t_index(t) / 2);
        return 1.0 + 0.5 * std::sin(w(s_half, t_half));
    };
    h.h = [past_factor](double s, double t, const AdaptedPathView& w, double x) {
        return x * past_factor(s, t, w);
    };
    h.h_s = zero;  // the path factor is not s-differentiable; value reads only
    h.h_x = [past_factor](double s, double t, const AdaptedPathView& w, double) {
        return past_factor(s, t, w);
    };
    h.h_xx = zero;
    h.h_sx = zero;
    h.h_xxx = zero;

    const SheetPath p = SheetPath::sample(GridSpec(32, 32), 1, derive_seed(53, 0));
    const ItoTerms terms = ito_residual(h, p, 0, 32, 32);
    CHECK(std::isfinite(terms.residual_frozen));
    CHECK(std::isfinite(terms.forward_term));
}

TEST_CASE("the adaptedness guard trips on future reads") {
    RandomIntegrand cheat;
    cheat.name = "peeks_at_the_corner";
    const auto zero = [](double, double, const AdaptedPathView&, double) { return 0.0; };
    cheat.h = [](double, double, const AdaptedPathView& w, double x) {
        return x * w(1.0, 1.0);  // reads the terminal value regardless of (s,t)
    };
    cheat.h_s = zero;
    cheat.h_x = zero;
    cheat.h_xx = zero;
    cheat.h_sx = zero;
    cheat.h_xxx = zero;
    const SheetPath p = SheetPath::sample(GridSpec(16, 16), 1, 1);
    CHECK_THROWS_AS(ito_residual(cheat, p, 0, 8, 8), NonAdaptedAccess);
}

TEST_CASE("raw local-time mode agrees with the substitution route on degree-2 entries") {
    const std::vector<RandomIntegrand> battery = ito_test_battery();
    ItoRawParams params;
    params.xgrid = XGrid(-3.0, 3.0, 90, 0.10);
    for (const char* name : {"x2", "sx2"}) {
        RunningStats smooth_acc, raw_acc;
        for (std::uint64_t r = 0; r < 24; ++r) {
            const SheetPath p = SheetPath::sample(GridSpec(96, 96), 1, derive_seed(54, r));
            const ItoTerms terms = ito_residual(battery_entry(battery, name), p, 0, 96, 96,
                                                ItoMode::raw_local_time, params);
            smooth_acc.add(terms.lt_terms_smooth);
            raw_acc.add(terms.lt_terms_raw);
        }
        INFO(name);
        CHECK(std::abs(raw_acc.mean() - smooth_acc.mean()) <=
              0.30 * std::abs(smooth_acc.mean()));
    }
}

TEST_CASE("mollification: constants and linear functions are fixed points") {
    const std::vector<RandomIntegrand> battery = ito_test_battery();
    const SheetPath p = SheetPath::sample(GridSpec(4, 4), 1, 2);
    const AdaptedPathView view(p);
    view.set_horizon(1.0, 1.0);

    const RandomIntegrand const_m = mollify(battery_entry(battery, "one"), 3);
    CHECK(const_m.h(0.5, 0.5, view, 0.3) == doctest::Approx(1.0).epsilon(1e-14));

    const RandomIntegrand lin_m = mollify(battery_entry(battery, "x"), 2);
    for (double x : {-1.2, 0.0, 0.8}) {
        CHECK(lin_m.h(0.5, 0.5, view, x) == doctest::Approx(x).epsilon(1e-12));
    }
}

TEST_CASE("mollification error decays like 1/k for Lipschitz functions") {
    RandomIntegrand absf;
    absf.name = "abs";
    const auto zero = [](double, double, const AdaptedPathView&, double) { return 0.0; };
    absf.h = [](double, double, const AdaptedPathView&, double x) { return std::abs(x); };
    absf.h_s = zero;
    absf.h_x = zero;
    absf.h_xx = zero;
    absf.h_sx = zero;
    absf.h_xxx = zero;
    const SheetPath p = SheetPath::sample(GridSpec(4, 4), 1, 2);
    const AdaptedPathView view(p);
    view.set_horizon(1.0, 1.0);
    double prev = 1e9;
    for (std::uint32_t k : {1u, 3u, 7u, 15u}) {
        const double err = std::abs(mollify(absf, k).h(0.5, 0.5, view, 0.0));
        CHECK(err < prev);
        // |h_k(0) - h(0)| = E|y|/(k+1)
        CHECK(err == doctest::Approx(std::sqrt(2.0 / M_PI) / (k + 1)).epsilon(1e-3));
        prev = err;
    }
}

TEST_CASE("line integral matches the Green decomposition on average") {
    // sum hx dW_line at fixed t against the plane forward + J + third term.
    const std::vector<RandomIntegrand> battery = ito_test_battery();
    const RandomIntegrand& h = battery_entry(battery, "x2");
    RunningStats acc;
    const std::uint32_t m = 64, n = 64;
    for (std::uint64_t r = 0; r < 200; ++r) {
        const SheetPath p = SheetPath::sample(GridSpec(m, n), 1, derive_seed(55, r));
        const AdaptedPathView view(p);
        double line = 0.0;
        for (std::uint32_t i = 0; i < m; ++i) {
            view.set_horizon(p.grid().s(i), 1.0);
            line += h.h_x(p.grid().s(i), 1.0, view, p.at(i, n)) *
                    (p.at(i + 1, n) - p.at(i, n));
        }
        const ItoTerms terms = ito_residual(h, p, 0, m, n);
        const double green_rhs = terms.forward_term + terms.j_term + terms.third_term;
        acc.add(line - green_rhs);
    }
    CHECK(std::abs(acc.mean()) <= 3.0 * acc.standard_error());
}
