#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "sheetlab/lt_integrals.hpp"
#include "sheetlab/rng.hpp"
#include "sheetlab/stats.hpp"

using namespace sheetlab;

namespace {

Integrand constant_fn(double c) {
    return Integrand(SmoothFunction{[c](double, double, double) { return c; },
                                    [](double, double, double) { return 0.0; }});
}

Integrand identity_fn() {
    return Integrand(SmoothFunction{[](double, double, double x) { return x; },
                                    [](double, double, double) { return 1.0; }});
}

}  // namespace

TEST_CASE("forward integral: telescoping, zero, and the x-identity") {
    const std::uint32_t n = 512;
    const SheetPath p = SheetPath::sample(GridSpec(2, n), 1, 1001);
    const double w_end = p.at(1, n);

    CHECK(forward_integral(constant_fn(1.0), p, 0, 1, n) == doctest::Approx(w_end).epsilon(1e-12));
    CHECK(forward_integral(constant_fn(0.0), p, 0, 1, n) == 0.0);

    // sum W dW = (W_t^2 - sum dW^2) / 2, an algebraic identity per path
    double qv = 0.0;
    for (std::uint32_t j = 0; j < n; ++j) {
        const double dw = p.at(1, j + 1) - p.at(1, j);
        qv += dw * dw;
    }
    CHECK(forward_integral(identity_fn(), p, 0, 1, n) ==
          doctest::Approx(0.5 * (w_end * w_end - qv)).epsilon(1e-10));
    // backward picks up the quadratic variation with the opposite sign
    CHECK(backward_integral(identity_fn(), p, 0, 1, n) ==
          doctest::Approx(0.5 * (w_end * w_end + qv)).epsilon(1e-10));
}

TEST_CASE("discrete reversal identity holds for arbitrary integrands") {
    const auto f = Integrand(SmoothFunction{
        [](double s, double t, double x) { return std::sin(3.0 * x) + s * t * x; }, nullptr});
    for (std::uint64_t seed : {5ull, 50ull, 500ull}) {
        const SheetPath p = SheetPath::sample(GridSpec(2, 256), 1, seed);
        for (std::uint32_t t_node : {64u, 177u, 256u}) {
            const double fwd_rev = reversed_backward_sum(f, p, 0, 1, t_node);
            const double bwd = backward_integral(f, p, 0, 1, t_node);
            CHECK(bwd + fwd_rev == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("backward - forward accumulates the quadratic variation s*t on average") {
    RunningStats acc;
    const std::uint32_t n = 256;
    for (std::uint64_t r = 0; r < 4000; ++r) {
        const SheetPath p = SheetPath::sample(GridSpec(2, n), 1, derive_seed(41, r));
        acc.add(backward_integral(identity_fn(), p, 0, 1, n) -
                forward_integral(identity_fn(), p, 0, 1, n));
    }
    // line at s = 1/2: E sum (dW)^2 = s*t = 0.5
    CHECK(std::abs(acc.mean() - 0.5) < 3.0 * acc.standard_error());
}

TEST_CASE("both line integrals are linear in the integrand") {
    const SheetPath p = SheetPath::sample(GridSpec(2, 128), 1, 606);
    Rng rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        const double a = 4.0 * (rng.uniform01() - 0.5);
        const double b = 4.0 * (rng.uniform01() - 0.5);
        const auto f = Integrand(SmoothFunction{
            [](double, double, double x) { return std::cos(x); }, nullptr});
        const auto g = Integrand(SmoothFunction{
            [](double s, double, double x) { return s * x; }, nullptr});
        const auto combo = Integrand(SmoothFunction{
            [a, b](double s, double, double x) {
                return a * std::cos(x) + b * (s * x);
            },
            nullptr});
        const double lhs = forward_integral(combo, p, 0, 1, 128);
        const double rhs =
            a * forward_integral(f, p, 0, 1, 128) + b * forward_integral(g, p, 0, 1, 128);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
        const double lhs_b = backward_integral(combo, p, 0, 1, 128);
        const double rhs_b =
            a * backward_integral(f, p, 0, 1, 128) + b * backward_integral(g, p, 0, 1, 128);
        CHECK(lhs_b == doctest::Approx(rhs_b).epsilon(1e-11));
    }
}

TEST_CASE("norm oracle values") {
    // f = 0
    CHECK(h_norm(constant_fn(0.0)).total == 0.0);
    // f = 1: 2 + 4 sqrt(2/pi), the two pieces in closed form
    const HNormReport one = h_norm(constant_fn(1.0));
    const double expected_one = 2.0 + 4.0 * std::sqrt(2.0 / M_PI);
    CHECK(one.total == doctest::Approx(expected_one).epsilon(1e-6));
    CHECK_FALSE(one.divergent);
    // f = x: l2 part 1/2, weighted part 1
    const HNormReport xr = h_norm(identity_fn());
    CHECK(xr.l2_part == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(xr.weighted_l1_part == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(xr.total == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("norm of an elementary step matches the smooth-path quadrature") {
    // indicator of x in (0, 1], all of (s,t): both evaluation paths agree
    ElementaryFunction step({0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, {1.0});
    const HNormReport elem = h_norm(Integrand(step));
    const auto smooth = Integrand(SmoothFunction{
        [](double, double, double x) { return (x > 0.0 && x <= 1.0) ? 1.0 : 0.0; }, nullptr});
    const HNormReport viaz = h_norm(smooth);
    CHECK(elem.total == doctest::Approx(viaz.total).epsilon(2e-3));
}

TEST_CASE("divergent norm is reported, not returned as a number") {
    const auto blows_up = Integrand(SmoothFunction{
        [](double, double, double x) { return std::exp(x * x); }, nullptr});
    const HNormReport r = h_norm(blows_up);
    CHECK(r.divergent);  // gaussian tail cannot absorb exp(x^2)
    const auto worse = Integrand(SmoothFunction{
        [](double, double, double x) { return std::exp(x * x * x * x); }, nullptr});
    CHECK(h_norm(worse).divergent);
}

TEST_CASE("triangle inequality for the discretised norm") {
    Rng rng(17);
    for (int trial = 0; trial < 4; ++trial) {
        const double a = 3.0 * (rng.uniform01() - 0.5);
        const double b = 3.0 * (rng.uniform01() - 0.5);
        const auto f = Integrand(SmoothFunction{
            [a](double s, double, double x) { return a * std::sin(x + s); }, nullptr});
        const auto g = Integrand(SmoothFunction{
            [b](double, double t, double x) { return b * std::cos(x * t); }, nullptr});
        const auto sum = Integrand(SmoothFunction{
            [a, b](double s, double t, double x) {
                return a * std::sin(x + s) + b * std::cos(x * t);
            },
            nullptr});
        CHECK(h_norm(sum).total <= h_norm(f).total + h_norm(g).total + 1e-12);
    }
}

TEST_CASE("elementary integral against the plane local-time field") {
    const SheetPath p = SheetPath::sample(GridSpec(64, 64), 1, 71);
    const XGrid xg(-2.0, 2.0, 80, 0.1);
    std::vector<std::uint32_t> eval{0, 16, 32, 48, 64};
    const LocalTimeField field = plane_local_time(p, 0, xg, eval, eval);
    const GridSpec& g = p.grid();

    // zero coefficient: zero integral
    ElementaryFunction zero_box({0.0, 1.0}, {0.0, 1.0}, {-1.0, 1.0}, {0.0});
    CHECK(elementary_lt_integral(zero_box, field, g) == 0.0);

    // full box: everything cancels except the two x-corners at (1,1)
    ElementaryFunction full({0.0, 1.0}, {0.0, 1.0}, {-2.0, 2.0}, {1.0});
    const std::uint32_t q_lo = xg.nearest_bin(-2.0), q_hi = xg.nearest_bin(2.0);
    const double expect = field.plane_value(q_hi, 4, 4) - field.plane_value(q_lo, 4, 4);
    CHECK(elementary_lt_integral(full, field, g) == doctest::Approx(expect).epsilon(1e-12));

    // additivity: two adjacent boxes with equal coefficients = the merged box
    ElementaryFunction split({0.0, 0.5, 1.0}, {0.0, 1.0}, {-1.0, 0.5}, {0.7, 0.7});
    ElementaryFunction merged({0.0, 1.0}, {0.0, 1.0}, {-1.0, 0.5}, {0.7});
    CHECK(elementary_lt_integral(split, field, g) ==
          doctest::Approx(elementary_lt_integral(merged, field, g)).epsilon(1e-12));

    // brute-force oracle: accumulate the eight signed corners by hand
    ElementaryFunction probe({0.25, 0.75}, {0.25, 1.0}, {-0.5, 0.25}, {1.3});
    const std::uint32_t xa = xg.nearest_bin(-0.5), xb = xg.nearest_bin(0.25);
    auto lv = [&](std::uint32_t q, std::uint32_t a, std::uint32_t b) {
        return field.plane_value(q, a, b);
    };
    const double oracle = lv(xb, 3, 4) - lv(xb, 1, 4) - lv(xa, 3, 4) + lv(xa, 1, 4) -
                          lv(xb, 3, 1) + lv(xb, 1, 1) + lv(xa, 3, 1) - lv(xa, 1, 1);
    CHECK(elementary_lt_integral(probe, field, g) ==
          doctest::Approx(1.3 * oracle).epsilon(1e-12));

    // knots off the evaluation lattice are rejected
    ElementaryFunction off({0.1, 1.0}, {0.0, 1.0}, {-1.0, 1.0}, {1.0});
    CHECK_THROWS_AS(elementary_lt_integral(off, field, g), std::invalid_argument);
}

TEST_CASE("local-time-space integral: exact cases and the truncation guard") {
    const SheetPath p = SheetPath::sample(GridSpec(64, 64), 1, 5150);
    CHECK(lt_space_integral(constant_fn(2.0), p, 0, 64, 64, 4) == doctest::Approx(0.0));
    CHECK(lt_space_integral(constant_fn(0.0), p, 0, 64, 64, 4) == 0.0);
    CHECK_THROWS_AS(lt_space_integral(constant_fn(1.0), p, 0, 64, 64, 0), std::invalid_argument);

    // f = x: each line contributes -sum(dW)^2 * ds/xi, an exact identity
    double expected = 0.0;
    for (std::uint32_t i = 4; i < 64; ++i) {
        double qv = 0.0;
        for (std::uint32_t j = 0; j < 64; ++j) {
            const double dw = p.at(i, j + 1) - p.at(i, j);
            qv += dw * dw;
        }
        expected -= qv * p.grid().ds() / p.grid().s(i);
    }
    CHECK(lt_space_integral(identity_fn(), p, 0, 64, 64, 4) ==
          doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("local-time-space integral against the derivative quadrature") {
    // f(s,t,x) = sin(x) s t, compared with -int int df/dx du dxi.
    const auto f = Integrand(SmoothFunction{
        [](double s, double t, double x) { return std::sin(x) * s * t; },
        [](double s, double t, double x) { return std::cos(x) * s * t; }});
    const std::uint32_t m = 256, n = 256, xi_min = 4;
    RunningStats sum_acc, ref_acc;
    for (std::uint64_t r = 0; r < 60; ++r) {
        const SheetPath p = SheetPath::sample(GridSpec(m, n), 1, derive_seed(42, r));
        const double lhs = lt_space_integral(f, p, 0, m, n, xi_min);
        const double rhs = dx_quadrature(f, p, 0, m, n, xi_min);
        sum_acc.add(lhs + rhs);
        ref_acc.add(std::abs(rhs));
    }
    CHECK(std::abs(sum_acc.mean()) < 3.0 * sum_acc.standard_error() + 0.02 * ref_acc.mean());
}

TEST_CASE("indicator integrand reproduces the plane local time") {
    // integral of 1{x <= x0} against dL ~ plane local time at x0 (MC means).
    // x0 away from 0 keeps the small-xi lines out of the picture: they hug level 0,
    // so the truncated xi-range carries no occupation mass at x0.
    const double x0 = 0.5;
    const auto ind = Integrand(SmoothFunction{
        [x0](double, double, double x) { return x <= x0 ? 1.0 : 0.0; }, nullptr});
    const std::uint32_t m = 512, n = 512;
    RunningStats lhs, rhs;
    for (std::uint64_t r = 0; r < 60; ++r) {
        const SheetPath p = SheetPath::sample(GridSpec(m, n), 1, derive_seed(43, r));
        lhs.add(lt_space_integral(ind, p, 0, m, n, 8));
        rhs.add(plane_local_time_at(p, 0, x0, default_bandwidth(n), m, n));
    }
    CHECK(std::abs(lhs.mean() - rhs.mean()) < 0.10 * std::abs(rhs.mean()));
}

TEST_CASE("multidimensional identity: exact inputs and the residual gate") {
    GridSpec grid(128, 128);
    const std::uint32_t t_cut = default_t_cut_index(grid);

    SmoothFunctionNd zero;
    zero.dim = 2;
    zero.f = [](double, double, std::span<const double>) { return 0.0; };
    zero.df_dxi = [](double, double, std::span<const double>, std::uint32_t) { return 0.0; };
    const SheetPath p = SheetPath::sample(grid, 2, 99);
    CHECK(multidim_lt_identity_residual(zero, p, 0, 128, t_cut, t_cut) == 0.0);
    CHECK_THROWS_AS(multidim_lt_identity_residual(zero, p, 0, 128, t_cut, 128),
                    std::invalid_argument);

    // f = x_0: the left side is exactly s*t by counting, and the truncated
    // sliver (the backward integral over [0, 1-t_cut]) has mean s*(1-t_cut),
    // which is exactly the residual's expected value.
    SmoothFunctionNd linear;
    linear.dim = 2;
    linear.f = [](double, double, std::span<const double> x) { return x[0]; };
    linear.df_dxi = [](double, double, std::span<const double>, std::uint32_t i) {
        return i == 0 ? 1.0 : 0.0;
    };
    const double sliver = 1.0 * (1.0 - grid.t(t_cut));
    RunningStats acc;
    for (std::uint64_t r = 0; r < 50; ++r) {
        const SheetPath q = SheetPath::sample(grid, 2, derive_seed(44, r));
        acc.add(multidim_lt_identity_residual(linear, q, 0, 128, t_cut, t_cut));
    }
    CHECK(std::abs(acc.mean() - sliver) <
          std::max(3.0 * acc.standard_error(), 0.10 * sliver));
}
