#include "sheetlab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "sheetlab/stats.hpp"

namespace sheetlab {

QuadratureRule gauss_legendre(std::size_t order) {
    if (order == 0) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const std::size_t half = (order + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Newton iteration from the Chebyshev-like initial guess.
        double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(order) + 0.5));
        double p1 = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            p1 = 1.0;
            double p2 = 0.0;
            for (std::size_t j = 0; j < order; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * x * p2 - static_cast<double>(j) * p3) /
                     (static_cast<double>(j) + 1.0);
            }
            const double dp = static_cast<double>(order) * (x * p1 - p2) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p2 = 0.0;
        p1 = 1.0;
        for (std::size_t j = 0; j < order; ++j) {
            const double p3 = p2;
            p2 = p1;
            p1 = ((2.0 * j + 1.0) * x * p2 - static_cast<double>(j) * p3) /
                 (static_cast<double>(j) + 1.0);
        }
        const double dp = static_cast<double>(order) * (x * p1 - p2) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[order - 1 - i] = x;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

QuadratureRule gauss_legendre_on(std::size_t order, double a, double b) {
    QuadratureRule base = gauss_legendre(order);
    const double mid = 0.5 * (a + b);
    const double halfw = 0.5 * (b - a);
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
        base.nodes[i] = mid + halfw * base.nodes[i];
        base.weights[i] *= halfw;
    }
    return base;
}

QuadratureRule composite_gauss_legendre(std::size_t order_per_panel,
                                        const std::vector<double>& boundaries) {
    if (boundaries.size() < 2) {
        throw std::invalid_argument("composite_gauss_legendre: need at least one panel");
    }
    QuadratureRule rule;
    for (std::size_t p = 0; p + 1 < boundaries.size(); ++p) {
        if (boundaries[p + 1] <= boundaries[p]) continue;  // skip degenerate panels
        QuadratureRule panel = gauss_legendre_on(order_per_panel, boundaries[p], boundaries[p + 1]);
        rule.nodes.insert(rule.nodes.end(), panel.nodes.begin(), panel.nodes.end());
        rule.weights.insert(rule.weights.end(), panel.weights.begin(), panel.weights.end());
    }
    return rule;
}

QuadratureRule normal_expectation_rule(std::size_t order_per_panel, std::size_t panels_per_side,
                                       double z_cut) {
    std::vector<double> boundaries;
    boundaries.reserve(2 * panels_per_side + 1);
    for (std::size_t i = 0; i <= 2 * panels_per_side; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(panels_per_side) - 1.0;
        boundaries.push_back(frac * z_cut);
    }
    QuadratureRule rule = composite_gauss_legendre(order_per_panel, boundaries);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        rule.weights[i] *= normal_pdf(rule.nodes[i]);
    }
    return rule;
}

}  // namespace sheetlab
