#include "sheetlab/ito.hpp"

#include <cmath>

#include "sheetlab/quadrature.hpp"

namespace sheetlab {

JField::JField(const SheetPath& path, std::uint32_t component) : grid_(path.grid()) {
    const std::uint32_t m = grid_.m, n = grid_.n;
    values_.assign(static_cast<std::size_t>(m + 1) * (n + 1), 0.0);
    for (std::uint32_t i = 1; i <= m; ++i) {
        double* row = values_.data() + static_cast<std::size_t>(i) * (n + 1);
        const double* prev = row - (n + 1);
        for (std::uint32_t j = 1; j <= n; ++j) {
            // Pairs (u,xi),(v,zeta) with u<v, xi>zeta that enter exactly at the
            // frontier (i,j) have v = i and xi = j, so the rectangle increment
            // of J factorises into two sheet increments.
            const double row_inc =
                path.at(i - 1, j, component) - path.at(i - 1, j - 1, component);
            const double col_inc =
                path.at(i, j - 1, component) - path.at(i - 1, j - 1, component);
            values_[static_cast<std::size_t>(i) * (n + 1) + j] =
                prev[j] + row[j - 1] - prev[j - 1] + row_inc * col_inc;
        }
    }
}

namespace {

// Trapezoid weight over an index range [0, count].
inline double trap_w(std::uint32_t idx, std::uint32_t count) {
    return (idx == 0 || idx == count) ? 0.5 : 1.0;
}

struct RawTerms {
    double t2 = 0.0, t3 = 0.0, t6 = 0.0;
};

RawTerms raw_local_time_terms(const RandomIntegrand& h, const SheetPath& path,
                              std::uint32_t component, std::uint32_t s_node,
                              std::uint32_t t_node, const AdaptedPathView& view,
                              const ItoRawParams& params) {
    const GridSpec& g = path.grid();
    const double s = g.s(s_node), t = g.t(t_node);
    const XGrid& xg = params.xgrid;
    RawTerms out;

    // -(s/2) int int h_x(s,xi,x) d_{x,xi} L(line t -> W(s,t)), Stieltjes sum
    // against the estimated field of the line at s.
    {
        const LocalTimeField f1 = line_local_time(path, component, s_node, xg);
        for (std::uint32_t q = 0; q + 1 < xg.p; ++q) {
            for (std::uint32_t k = 0; k < t_node; ++k) {
                const double inc = f1.line_value(q + 1, k + 1) - f1.line_value(q, k + 1) -
                                   f1.line_value(q + 1, k) + f1.line_value(q, k);
                if (inc == 0.0) continue;
                view.set_horizon(s, g.t(k));
                out.t2 -= 0.5 * s * h.h_x(s, g.t(k), view, xg.center(q)) * inc;
            }
        }
    }
    // -(t/2) int int h_x(u,t,x) d_{x,u} L(line s -> W(s,t)).
    {
        const LocalTimeField f2 = line2_local_time(path, component, t_node, xg);
        for (std::uint32_t q = 0; q + 1 < xg.p; ++q) {
            for (std::uint32_t i = 0; i < s_node; ++i) {
                const double inc = f2.line_value(q + 1, i + 1) - f2.line_value(q, i + 1) -
                                   f2.line_value(q + 1, i) + f2.line_value(q, i);
                if (inc == 0.0) continue;
                view.set_horizon(g.s(i), t);
                out.t3 -= 0.5 * t * h.h_x(g.s(i), t, view, xg.center(q)) * inc;
            }
        }
    }
    // (1/2) int int int {u h_sx + h_x + u xi h_xxx}(u,xi,x) dL^x_{u,xi}:
    // 8-corner Stieltjes sums against the full plane cube.
    {
        std::vector<std::uint32_t> s_eval(s_node + 1), t_eval(t_node + 1);
        for (std::uint32_t i = 0; i <= s_node; ++i) s_eval[i] = i;
        for (std::uint32_t j = 0; j <= t_node; ++j) t_eval[j] = j;
        const LocalTimeField cube = plane_local_time(path, component, xg, s_eval, t_eval);
        for (std::uint32_t q = 0; q + 1 < xg.p; ++q) {
            for (std::uint32_t i = 0; i < s_node; ++i) {
                for (std::uint32_t j = 0; j < t_node; ++j) {
                    const double corner =
                        cube.plane_value(q + 1, i + 1, j + 1) - cube.plane_value(q, i + 1, j + 1) -
                        cube.plane_value(q + 1, i, j + 1) + cube.plane_value(q, i, j + 1) -
                        cube.plane_value(q + 1, i + 1, j) + cube.plane_value(q, i + 1, j) +
                        cube.plane_value(q + 1, i, j) - cube.plane_value(q, i, j);
                    if (corner == 0.0) continue;
                    const double u = g.s(i), xi = g.t(j), x = xg.center(q);
                    view.set_horizon(u, xi);
                    const double gval = u * h.h_sx(u, xi, view, x) + h.h_x(u, xi, view, x) +
                                        u * xi * h.h_xxx(u, xi, view, x);
                    out.t6 += 0.5 * gval * corner;
                }
            }
        }
    }
    return out;
}

}  // namespace

ItoTerms ito_residual(const RandomIntegrand& h, const SheetPath& path, std::uint32_t component,
                      std::uint32_t s_node, std::uint32_t t_node, ItoMode mode,
                      const ItoRawParams& raw_params) {
    if (s_node == 0 || t_node == 0) {
        throw std::invalid_argument("ito_residual: s and t must be positive grid nodes");
    }
    const GridSpec& g = path.grid();
    const double s = g.s(s_node), t = g.t(t_node);
    const double ds = g.ds(), dt = g.dt();
    const AdaptedPathView view(path);
    ItoTerms out;

    view.set_horizon(s, t);
    out.lhs = h.h(s, t, view, path.at(s_node, t_node, component));
    view.set_horizon(0.0, t);
    out.lhs -= h.h(0.0, t, view, 0.0);

    // Line terms at fixed t (trapezoid in u; the d_uW sums stay left-endpoint).
    for (std::uint32_t i = 0; i <= s_node; ++i) {
        const double u = g.s(i), w = path.at(i, t_node, component);
        view.set_horizon(u, t);
        const double wgt = trap_w(i, s_node) * ds;
        out.ds_term += wgt * h.h_s(u, t, view, w);
        out.line_t_term += wgt * 0.5 * t * h.h_xx(u, t, view, w);
    }

    const JField j_field(path, component);
    for (std::uint32_t i = 0; i < s_node; ++i) {
        const double u = g.s(i);
        for (std::uint32_t j = 0; j < t_node; ++j) {
            const double xi = g.t(j);
            const double w = path.at(i, j, component);
            view.set_horizon(u, xi);
            const double cell_w = path.at(i + 1, j + 1, component) -
                                  path.at(i, j + 1, component) -
                                  path.at(i + 1, j, component) + w;
            out.forward_term += h.h_x(u, xi, view, w) * cell_w;
            out.j_term += h.h_xx(u, xi, view, w) * j_field.cell_increment(i + 1, j + 1);
        }
    }

    // int_0^t { int_0^s (u/2) h_xxx(u,xi,W) d_u W } dxi.
    for (std::uint32_t j = 0; j <= t_node; ++j) {
        const double xi = g.t(j);
        double inner = 0.0;
        for (std::uint32_t i = 0; i < s_node; ++i) {
            const double u = g.s(i), w = path.at(i, j, component);
            view.set_horizon(u, xi);
            inner += 0.5 * u * h.h_xxx(u, xi, view, w) *
                     (path.at(i + 1, j, component) - w);
        }
        out.third_term += trap_w(j, t_node) * dt * inner;
    }

    // The two readings of the t-direction local-time term.
    for (std::uint32_t j = 0; j <= t_node; ++j) {
        const double xi = g.t(j), w = path.at(s_node, j, component);
        view.set_horizon(s, xi);
        out.l2_frozen += trap_w(j, t_node) * dt * 0.5 * s * h.h_xx(s, xi, view, w);
    }
    for (std::uint32_t i = 0; i <= s_node; ++i) {
        const double u = g.s(i);
        for (std::uint32_t j = 0; j <= t_node; ++j) {
            const double xi = g.t(j), w = path.at(i, j, component);
            view.set_horizon(u, xi);
            out.l2_running +=
                trap_w(i, s_node) * trap_w(j, t_node) * ds * dt * 0.5 * h.h_xx(u, xi, view, w);
        }
    }

    const double rhs_frozen =
        out.ds_term + out.line_t_term + out.forward_term + out.j_term + out.third_term;
    out.residual_frozen = out.lhs - rhs_frozen;
    // third_term = l2_frozen + plane contribution; swapping in the running
    // reading shifts the residual by (l2_frozen - l2_running).
    out.residual_running = out.residual_frozen + (out.l2_frozen - out.l2_running);
    out.lt_terms_smooth = out.line_t_term + out.third_term;

    if (mode == ItoMode::raw_local_time) {
        const RawTerms raw = raw_local_time_terms(h, path, component, s_node, t_node, view,
                                                  raw_params);
        out.lt_terms_raw = raw.t2 + raw.t3 + raw.t6;
        out.residual_raw =
            out.lhs - (out.ds_term + out.forward_term + out.j_term + out.lt_terms_raw);
    }
    return out;
}

RandomIntegrand mollify(const RandomIntegrand& h, std::uint32_t level) {
    // Quadrature against the standard normal; weights renormalised to sum to
    // one so constants mollify to themselves exactly.
    QuadratureRule rule = normal_expectation_rule(8, 8, 6.0);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    for (double& w : rule.weights) w /= wsum;

    const double shrink = 1.0 / (static_cast<double>(level) + 1.0);
    auto wrap = [rule, shrink](const RandomIntegrand::Fn& fn) -> RandomIntegrand::Fn {
        if (!fn) return fn;
        return [rule, shrink, fn](double s, double t, const AdaptedPathView& w,
                                  double x) -> double {
            double acc = 0.0;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                acc += rule.weights[q] * fn(s, t, w, x - rule.nodes[q] * shrink);
            }
            return acc;
        };
    };

    RandomIntegrand out;
    out.name = h.name + "_mollified_" + std::to_string(level);
    out.h = wrap(h.h);
    out.h_s = wrap(h.h_s);
    out.h_x = wrap(h.h_x);
    out.h_xx = wrap(h.h_xx);
    out.h_sx = wrap(h.h_sx);
    out.h_xxx = wrap(h.h_xxx);
    return out;
}

std::vector<RandomIntegrand> ito_test_battery() {
    using Fn = RandomIntegrand::Fn;
    const Fn zero = [](double, double, const AdaptedPathView&, double) { return 0.0; };
    const Fn one = [](double, double, const AdaptedPathView&, double) { return 1.0; };
    auto fn = [](double (*f)(double, double, double)) -> Fn {
        return [f](double s, double t, const AdaptedPathView&, double x) { return f(s, t, x); };
    };

    std::vector<RandomIntegrand> battery;
    battery.push_back({"one", one, zero, zero, zero, zero, zero});
    battery.push_back({"x", fn(+[](double, double, double x) { return x; }), zero, one, zero,
                       zero, zero});
    battery.push_back({"x2", fn(+[](double, double, double x) { return x * x; }), zero,
                       fn(+[](double, double, double x) { return 2.0 * x; }),
                       fn(+[](double, double, double) { return 2.0; }), zero, zero});
    battery.push_back({"x3", fn(+[](double, double, double x) { return x * x * x; }), zero,
                       fn(+[](double, double, double x) { return 3.0 * x * x; }),
                       fn(+[](double, double, double x) { return 6.0 * x; }), zero,
                       fn(+[](double, double, double) { return 6.0; })});
    battery.push_back({"sx", fn(+[](double s, double, double x) { return s * x; }),
                       fn(+[](double, double, double x) { return x; }),
                       fn(+[](double s, double, double) { return s; }), zero, one, zero});
    battery.push_back({"sx2", fn(+[](double s, double, double x) { return s * x * x; }),
                       fn(+[](double, double, double x) { return x * x; }),
                       fn(+[](double s, double, double x) { return 2.0 * s * x; }),
                       fn(+[](double s, double, double) { return 2.0 * s; }),
                       fn(+[](double, double, double x) { return 2.0 * x; }), zero});
    // t-modulated entry; the t-dependence is additive so it cancels between
    // h(s,t,.) and h(0,t,.), which is what the identity's boundary term needs.
    battery.push_back(
        {"xt_mod",
         fn(+[](double s, double t, double x) { return x + s * s * std::sin(M_PI * t); }),
         fn(+[](double s, double t, double) { return 2.0 * s * std::sin(M_PI * t); }), one, zero,
         zero, zero});
    return battery;
}

}  // namespace sheetlab
