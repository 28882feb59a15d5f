#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace sheetlab {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1,1].
QuadratureRule gauss_legendre(std::size_t order);

/// Gauss-Legendre rule mapped to [a,b].
QuadratureRule gauss_legendre_on(std::size_t order, double a, double b);

/// Composite Gauss-Legendre over given panel boundaries.
QuadratureRule composite_gauss_legendre(std::size_t order_per_panel,
                                        const std::vector<double>& boundaries);

/// Nodes/weights for E[g(Z)], Z standard normal: composite Gauss-Legendre on
/// [-z_cut, z_cut] against the normal density, split at 0 so that integrands
/// with a kink at the origin (|z|, sign changes) keep full accuracy.
QuadratureRule normal_expectation_rule(std::size_t order_per_panel, std::size_t panels_per_side,
                                       double z_cut);

inline double apply(const QuadratureRule& rule, const std::function<double(double)>& g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * g(rule.nodes[i]);
    return acc;
}

}  // namespace sheetlab
