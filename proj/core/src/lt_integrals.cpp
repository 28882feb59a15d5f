#include "sheetlab/lt_integrals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sheetlab/quadrature.hpp"
#include "sheetlab/stats.hpp"

namespace sheetlab {

double forward_integral(const Integrand& f, const SheetPath& path, std::uint32_t component,
                        std::uint32_t s_node, std::uint32_t t_node) {
    if (s_node == 0) throw std::invalid_argument("forward_integral: s = 0 is degenerate");
    const GridSpec& g = path.grid();
    const double s = g.s(s_node);
    double acc = 0.0;
    for (std::uint32_t j = 0; j < t_node; ++j) {
        const double w = path.at(s_node, j, component);
        acc += f(s, g.t(j), w) * (path.at(s_node, j + 1, component) - w);
    }
    return acc;
}

double backward_integral(const Integrand& f, const SheetPath& path, std::uint32_t component,
                         std::uint32_t s_node, std::uint32_t t_node) {
    if (s_node == 0) throw std::invalid_argument("backward_integral: s = 0 is degenerate");
    const GridSpec& g = path.grid();
    const double s = g.s(s_node);
    double acc = 0.0;
    for (std::uint32_t j = 0; j < t_node; ++j) {
        const double w1 = path.at(s_node, j + 1, component);
        acc += f(s, g.t(j + 1), w1) * (w1 - path.at(s_node, j, component));
    }
    return acc;
}

double reversed_backward_sum(const Integrand& f, const SheetPath& path, std::uint32_t component,
                             std::uint32_t s_node, std::uint32_t t_node) {
    const GridSpec& g = path.grid();
    const double s = g.s(s_node);
    double acc = 0.0;
    // u_k = k/n over [1-t, 1); hatW(s, u) = W(s, 1-u).
    for (std::uint32_t k = g.n - t_node; k < g.n; ++k) {
        const double hat_here = path.at(s_node, g.n - k, component);
        const double hat_next = path.at(s_node, g.n - k - 1, component);
        acc += f(s, 1.0 - g.t(k), hat_here) * (hat_next - hat_here);
    }
    return acc;
}

namespace {

// int_a^b |z| phi(z) dz in closed form.
double abs_z_mass(double a, double b) {
    if (a >= 0.0) return normal_pdf(a) - normal_pdf(b);
    if (b <= 0.0) return normal_pdf(b) - normal_pdf(a);
    return 2.0 * normal_pdf(0.0) - normal_pdf(a) - normal_pdf(b);
}

HNormReport h_norm_elementary(const ElementaryFunction& f, const HNormQuadSpec& quad) {
    // Per (s,t) box the x-expectations have closed forms, so only the (s,t)
    // integration is numeric: per-box Gauss-Legendre in the substituted
    // coordinates u = sqrt(s), v = sqrt(t).
    const QuadratureRule gl = gauss_legendre(quad.uv_order);
    double l2_sq = 0.0, weighted = 0.0;
    for (std::size_t js = 0; js < f.ns(); ++js) {
        const double s_lo = std::clamp(f.s_knots[js], 0.0, 1.0);
        const double s_hi = std::clamp(f.s_knots[js + 1], 0.0, 1.0);
        if (s_hi <= s_lo) continue;
        const double u_lo = std::sqrt(s_lo), u_hi = std::sqrt(s_hi);
        for (std::size_t kt = 0; kt < f.nt(); ++kt) {
            const double t_lo = std::clamp(f.t_knots[kt], 0.0, 1.0);
            const double t_hi = std::clamp(f.t_knots[kt + 1], 0.0, 1.0);
            if (t_hi <= t_lo) continue;
            const double v_lo = std::sqrt(t_lo), v_hi = std::sqrt(t_hi);
            for (std::size_t iu = 0; iu < gl.nodes.size(); ++iu) {
                const double u = 0.5 * (u_lo + u_hi) + 0.5 * (u_hi - u_lo) * gl.nodes[iu];
                const double wu = 0.5 * (u_hi - u_lo) * gl.weights[iu];
                for (std::size_t iv = 0; iv < gl.nodes.size(); ++iv) {
                    const double v = 0.5 * (v_lo + v_hi) + 0.5 * (v_hi - v_lo) * gl.nodes[iv];
                    const double wv = 0.5 * (v_hi - v_lo) * gl.weights[iv];
                    const double sigma = u * v;
                    double e_f2 = 0.0, e_abs = 0.0;
                    for (std::size_t ix = 0; ix < f.nx(); ++ix) {
                        const double c = f.coefficient(ix, js, kt);
                        if (c == 0.0) continue;
                        const double za = f.x_knots[ix] / sigma;
                        const double zb = f.x_knots[ix + 1] / sigma;
                        e_f2 += c * c * (normal_cdf(zb) - normal_cdf(za));
                        e_abs += std::abs(c) * abs_z_mass(za, zb);
                    }
                    // ds dt = 4 u v du dv; the weighted part carries 1/(st) * sigma
                    // = 1/(uv), which cancels against the jacobian.
                    l2_sq += 4.0 * u * v * wu * wv * e_f2;
                    weighted += 4.0 * wu * wv * e_abs;
                }
            }
        }
    }
    HNormReport report;
    report.l2_part = std::sqrt(l2_sq);
    report.weighted_l1_part = weighted;
    report.total = 2.0 * report.l2_part + weighted;
    report.divergent = !std::isfinite(report.total);
    return report;
}

HNormReport h_norm_smooth(const Integrand& f, const HNormQuadSpec& quad) {
    const QuadratureRule uv = gauss_legendre_on(quad.uv_order, 0.0, 1.0);
    const QuadratureRule zr = normal_expectation_rule(quad.z_panel_order, quad.z_panels,
                                                      quad.z_cut);
    double l2_sq = 0.0, weighted = 0.0;
    bool tail_dominated = false;
    for (std::size_t iu = 0; iu < uv.nodes.size(); ++iu) {
        const double u = uv.nodes[iu];
        for (std::size_t iv = 0; iv < uv.nodes.size(); ++iv) {
            const double v = uv.nodes[iv];
            const double s = u * u, t = v * v, sigma = u * v;
            double e_f2 = 0.0, e_abs = 0.0;
            for (std::size_t iz = 0; iz < zr.nodes.size(); ++iz) {
                const double z = zr.nodes[iz];
                const double val = f(s, t, sigma * z);
                e_f2 += zr.weights[iz] * val * val;
                e_abs += zr.weights[iz] * std::abs(val * z);
            }
            // Truncation sentinel: if the integrand at the edge of the
            // truncated x-range still carries visible mass, the gaussian
            // expectation cannot be trusted and f is reported outside the
            // space rather than assigned a number.
            const double edge = f(s, t, sigma * quad.z_cut);
            if (edge * edge * normal_pdf(quad.z_cut) > 1e-9 * (1.0 + e_f2)) {
                tail_dominated = true;
            }
            const double wuv = uv.weights[iu] * uv.weights[iv];
            l2_sq += 4.0 * u * v * wuv * e_f2;
            weighted += 4.0 * wuv * e_abs;
        }
    }
    HNormReport report;
    report.l2_part = std::sqrt(l2_sq);
    report.weighted_l1_part = weighted;
    report.total = 2.0 * report.l2_part + weighted;
    report.divergent = !std::isfinite(report.total) || tail_dominated;
    if (tail_dominated) report.total = std::numeric_limits<double>::infinity();
    return report;
}

}  // namespace

HNormReport h_norm(const Integrand& f, const HNormQuadSpec& quad) {
    return f.kind() == Integrand::Kind::elementary ? h_norm_elementary(f.elementary(), quad)
                                                   : h_norm_smooth(f, quad);
}

namespace {

std::uint32_t lattice_position(const std::vector<std::uint32_t>& lattice, std::uint32_t node,
                               const char* what) {
    const auto it = std::lower_bound(lattice.begin(), lattice.end(), node);
    if (it == lattice.end() || *it != node) {
        throw std::invalid_argument(std::string("elementary_lt_integral: ") + what +
                                    " knot not on the local-time evaluation lattice");
    }
    return static_cast<std::uint32_t>(it - lattice.begin());
}

}  // namespace

double elementary_lt_integral(const ElementaryFunction& f, const LocalTimeField& field,
                              const GridSpec& grid) {
    if (field.kind != LtKind::plane) {
        throw std::invalid_argument("elementary_lt_integral: plane local-time field required");
    }
    // Resolve knot coordinates once: s/t knots must sit on the evaluation
    // lattice exactly; x knots snap to the nearest bin center.
    std::vector<std::uint32_t> s_pos(f.ns() + 1), t_pos(f.nt() + 1), x_pos(f.nx() + 1);
    for (std::size_t j = 0; j <= f.ns(); ++j) {
        s_pos[j] = lattice_position(field.s_eval, grid.s_index(f.s_knots[j]), "s");
    }
    for (std::size_t k = 0; k <= f.nt(); ++k) {
        t_pos[k] = lattice_position(field.t_eval, grid.t_index(f.t_knots[k]), "t");
    }
    for (std::size_t i = 0; i <= f.nx(); ++i) x_pos[i] = field.xgrid.nearest_bin(f.x_knots[i]);

    double acc = 0.0;
    for (std::size_t ix = 0; ix < f.nx(); ++ix) {
        for (std::size_t js = 0; js < f.ns(); ++js) {
            for (std::size_t kt = 0; kt < f.nt(); ++kt) {
                const double c = f.coefficient(ix, js, kt);
                if (c == 0.0) continue;
                const std::uint32_t xl = x_pos[ix], xh = x_pos[ix + 1];
                const std::uint32_t sl = s_pos[js], sh = s_pos[js + 1];
                const std::uint32_t tl = t_pos[kt], th = t_pos[kt + 1];
                const double corner_sum =
                    field.plane_value(xh, sh, th) - field.plane_value(xh, sl, th) -
                    field.plane_value(xl, sh, th) + field.plane_value(xl, sl, th) -
                    field.plane_value(xh, sh, tl) + field.plane_value(xh, sl, tl) +
                    field.plane_value(xl, sh, tl) - field.plane_value(xl, sl, tl);
                acc += c * corner_sum;
            }
        }
    }
    return acc;
}

double lt_space_integral(const Integrand& f, const SheetPath& path, std::uint32_t component,
                         std::uint32_t s_node, std::uint32_t t_node, std::uint32_t xi_min_node) {
    if (xi_min_node == 0) {
        throw std::invalid_argument("lt_space_integral: xi_min must be a positive grid node");
    }
    if (s_node == 0) throw std::invalid_argument("lt_space_integral: s = 0 is degenerate");
    const GridSpec& g = path.grid();
    const double ds = g.ds();
    double acc = 0.0;
    for (std::uint32_t i = xi_min_node; i < s_node; ++i) {
        const double xi = g.s(i);
        // forward - backward along line xi in a single pass:
        //   sum_j [f(xi,t_j,W_j) - f(xi,t_{j+1},W_{j+1})] (W_{j+1} - W_j).
        double line = 0.0;
        double w_here = path.at(i, 0, component);
        double f_here = f(xi, 0.0, w_here);
        for (std::uint32_t j = 0; j < t_node; ++j) {
            const double w_next = path.at(i, j + 1, component);
            const double f_next = f(xi, g.t(j + 1), w_next);
            line += (f_here - f_next) * (w_next - w_here);
            w_here = w_next;
            f_here = f_next;
        }
        acc += line * ds / xi;
    }
    return acc;
}

double dx_quadrature(const Integrand& f, const SheetPath& path, std::uint32_t component,
                     std::uint32_t s_node, std::uint32_t t_node, std::uint32_t xi_min_node) {
    const GridSpec& g = path.grid();
    const double ds = g.ds(), dt = g.dt();
    double acc = 0.0;
    for (std::uint32_t i = xi_min_node; i < s_node; ++i) {
        const double xi = g.s(i);
        double line = 0.0;
        for (std::uint32_t j = 0; j <= t_node; ++j) {
            const double weight = (j == 0 || j == t_node) ? 0.5 : 1.0;  // trapezoid in u
            line += weight * f.dx(xi, g.t(j), path.at(i, j, component));
        }
        acc += line * dt * ds;
    }
    return acc;
}

double multidim_lt_identity_residual(const SmoothFunctionNd& f, const SheetPath& path,
                                     std::uint32_t component, std::uint32_t s_node,
                                     std::uint32_t t_node, std::uint32_t t_cut_node) {
    const GridSpec& g = path.grid();
    if (t_cut_node >= g.n) {
        throw std::invalid_argument("multidim_lt_identity_residual: t_cut must be < 1");
    }
    if (t_node > t_cut_node) {
        throw std::invalid_argument("multidim_lt_identity_residual: need t <= t_cut");
    }
    if (s_node == 0) throw std::invalid_argument("multidim_lt_identity_residual: s = 0");
    if (path.dim() != f.dim) {
        throw std::invalid_argument("multidim_lt_identity_residual: dimension mismatch");
    }
    const double ds = g.ds(), dt = g.dt();
    const std::uint32_t d = path.dim();

    const ReversalDriftSheet drift_sheet(path, component, t_cut_node);

    // Left side: trapezoid-in-u quadrature of the x_i derivative along every
    // line xi in [0, s).
    double lhs = 0.0;
    for (std::uint32_t i = 0; i < s_node; ++i) {
        const double xi = g.s(i);
        double line = 0.0;
        const double* row = path.line(i);
        for (std::uint32_t j = 0; j <= t_node; ++j) {
            const double weight = (j == 0 || j == t_node) ? 0.5 : 1.0;
            line += weight * f.df_dxi(xi, g.t(j),
                                      std::span<const double>(row + std::size_t(j) * d, d),
                                      component);
        }
        lhs += line * dt * ds;
    }

    // Right side, lines xi in [ds, s) because of the 1/xi weight.
    double forward_term = 0.0, drift_b_term = 0.0, drift_w_term = 0.0;
    const std::uint32_t k_lo = g.n - t_node;  // u in [1-t, t_cut)
    for (std::uint32_t i = 1; i < s_node; ++i) {
        const double xi = g.s(i);
        const double* row = path.line(i);
        double fwd = 0.0;
        for (std::uint32_t j = 0; j < t_node; ++j) {
            const double w = row[std::size_t(j) * d + component];
            fwd += f.f(xi, g.t(j), std::span<const double>(row + std::size_t(j) * d, d)) *
                   (row[std::size_t(j + 1) * d + component] - w);
        }
        double b_sum = 0.0, w_sum = 0.0;
        for (std::uint32_t k = k_lo; k < t_cut_node; ++k) {
            const double u = g.t(k);
            const std::uint32_t orig = g.n - k;  // hatW(xi, u) = W(xi, 1-u)
            const std::span<const double> hat_w(row + std::size_t(orig) * d, d);
            const double fval = f.f(xi, 1.0 - u, hat_w);
            b_sum += fval * drift_sheet.t_increment(i, k);
            w_sum += fval * hat_w[component] / (1.0 - u) * dt;
        }
        forward_term += fwd * ds / xi;
        drift_b_term += b_sum * ds / xi;
        drift_w_term += w_sum * ds / xi;
    }
    const double rhs = -forward_term - drift_b_term + drift_w_term;
    return lhs - rhs;
}

}  // namespace sheetlab
