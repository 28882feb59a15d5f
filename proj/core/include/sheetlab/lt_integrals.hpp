#pragma once

#include <cstdint>
#include <vector>

#include "sheetlab/integrand.hpp"
#include "sheetlab/local_time.hpp"
#include "sheetlab/sheet.hpp"

namespace sheetlab {

/// Forward line integral sum_{t_j < t} f(s, t_j, W(s,t_j)) (W(s,t_{j+1}) - W(s,t_j)).
double forward_integral(const Integrand& f, const SheetPath& path, std::uint32_t component,
                        std::uint32_t s_node, std::uint32_t t_node);

/// Backward line integral sum_{t_j < t} f(s, t_{j+1}, W(s,t_{j+1})) (W(s,t_{j+1}) - W(s,t_j)).
double backward_integral(const Integrand& f, const SheetPath& path, std::uint32_t component,
                         std::uint32_t s_node, std::uint32_t t_node);

/// Reversed-line counterpart of the backward integral:
///   sum_{u_k in [1-t, 1)} f(s, 1-u_k, hatW(s,u_k)) (hatW(s,u_{k+1}) - hatW(s,u_k)).
/// Term by term this is the negated backward sum, so backward + reversed = 0
/// up to float reassociation.
double reversed_backward_sum(const Integrand& f, const SheetPath& path, std::uint32_t component,
                             std::uint32_t s_node, std::uint32_t t_node);

struct HNormQuadSpec {
    std::size_t uv_order = 24;      // Gauss-Legendre order per (sqrt-substituted) axis
    std::size_t z_panel_order = 8;  // order per panel of the normal-expectation rule
    std::size_t z_panels = 12;      // panels per half-line
    double z_cut = 8.0;             // truncation in standard deviations
};

struct HNormReport {
    double l2_part = 0.0;           // (integral of E[f^2])^(1/2)
    double weighted_l1_part = 0.0;  // integral of E|f(s,t,W) W/(st)|
    double total = 0.0;             // 2*l2_part + weighted_l1_part
    bool divergent = false;         // non-finite quadrature result: f outside the space
};

/// Banach norm of a test function:
///   ||f|| = 2 (int int E[f^2(s,t,W_st)] ds dt)^(1/2)
///           + int int E| f(s,t,W_st) W_st/(st) | ds dt.
/// The 1/(st) weight is removed exactly by the substitution s=u^2, t=v^2;
/// the x-expectations use a composite Gauss-Legendre rule against the normal
/// density, split at 0 (and, for elementary f, evaluated in closed form).
HNormReport h_norm(const Integrand& f, const HNormQuadSpec& quad = {});

/// Integral of an elementary function against an estimated plane local-time
/// field: sum of coefficients times the 8-corner alternating combination of L
/// at the box corners. Box knots must lie on the field's evaluation lattices
/// (x knots snap to the nearest bin center).
double elementary_lt_integral(const ElementaryFunction& f, const LocalTimeField& plane_field,
                              const GridSpec& grid);

/// Local-time-space integral over [xi_min, s) x [0, t):
///   sum_{xi_min <= xi_i < s} [forward(f; xi_i) - backward(f; xi_i)] * ds / xi_i,
/// the double integral with the 1/xi weight truncated at xi_min.
double lt_space_integral(const Integrand& f, const SheetPath& path, std::uint32_t component,
                         std::uint32_t s_node, std::uint32_t t_node, std::uint32_t xi_min_node);

/// Direct quadrature of int_0^s int_0^t df/dx (xi, u, W(xi,u)) du dxi over the
/// same truncated xi-range (trapezoid in u, left lines in xi).
double dx_quadrature(const Integrand& f, const SheetPath& path, std::uint32_t component,
                     std::uint32_t s_node, std::uint32_t t_node, std::uint32_t xi_min_node);

/// Residual of the d-dimensional identity
///   int int d_{x_i} f(xi,u,W) du dxi
///     = - int int f dW^(i)/xi dxi  - int int_{[1-t,tcut)} f(xi,1-u,hatW) dB^(i)/xi dxi
///       + int int_{[1-t,tcut)} f(xi,1-u,hatW) hatW^(i)/(xi(1-u)) du dxi,
/// with B extracted from the reversal-drift representation and both reversed
/// integrals truncated at t_cut (the discarded sliver is the backward integral
/// over [0, 1-t_cut]).
double multidim_lt_identity_residual(const SmoothFunctionNd& f, const SheetPath& path,
                                     std::uint32_t component, std::uint32_t s_node,
                                     std::uint32_t t_node, std::uint32_t t_cut_node);

}  // namespace sheetlab
