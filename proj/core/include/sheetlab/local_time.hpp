#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sheetlab/sheet.hpp"

namespace sheetlab {

/// Level grid for occupation-density estimation: p bins on [x_min, x_max]
/// with centers x_q = x_min + (q + 1/2) dx, plus the window half-width.
struct XGrid {
    double x_min = -4.0;
    double x_max = 4.0;
    std::uint32_t p = 100;
    double bandwidth = 0.05;  // half-width of the occupation window

    XGrid() = default;
    XGrid(double lo, double hi, std::uint32_t bins, double eps)
        : x_min(lo), x_max(hi), p(bins), bandwidth(eps) {
        if (!(x_min < x_max) || p == 0 || !(bandwidth > 0.0)) {
            throw std::invalid_argument("XGrid: need x_min < x_max, p >= 1, bandwidth > 0");
        }
    }

    double dx() const { return (x_max - x_min) / static_cast<double>(p); }
    double center(std::uint32_t q) const {
        return x_min + (static_cast<double>(q) + 0.5) * dx();
    }

    /// Nearest bin center to x (no interpolation between centers).
    std::uint32_t nearest_bin(double x) const {
        const double raw = (x - x_min) / dx() - 0.5;
        long q = static_cast<long>(std::lround(raw));
        if (q < 0) q = 0;
        if (q >= static_cast<long>(p)) q = static_cast<long>(p) - 1;
        return static_cast<std::uint32_t>(q);
    }
};

/// Default bandwidth schedule eps_x = c * n^{-1/4}.
inline double default_bandwidth(std::uint32_t n_steps, double c = 1.0) {
    return c * std::pow(static_cast<double>(n_steps), -0.25);
}

enum class LtKind {
    line1,  // occupation density in dt of the line t -> W(s,t), s fixed
    line2,  // occupation density in ds of the line s -> W(s,t), t fixed
    plane,  // occupation density in ds dt of the sheet
};

/// Occupation-density estimates over (x-bin, time index). For line kinds the
/// time index runs over the free coordinate of the line; for the plane kind
/// the samples live on a caller-chosen (s,t) evaluation lattice.
///
/// Nonnegative everywhere and nondecreasing in every time index by
/// construction (cumulative sums of nonnegative window counts).
class LocalTimeField {
  public:
    LtKind kind;
    XGrid xgrid;
    std::uint32_t component = 0;
    std::uint32_t fixed_index = 0;     // s-node for line1, t-node for line2; unused for plane
    std::vector<std::uint32_t> s_eval;  // plane only: s-node lattice
    std::vector<std::uint32_t> t_eval;  // plane only: t-node lattice
    std::uint32_t time_nodes = 0;       // line kinds: number of time nodes (n+1 or m+1)
    std::vector<double> samples;

    /// Line kinds: value at (bin q, time index idx).
    double line_value(std::uint32_t q, std::uint32_t idx) const {
        return samples[static_cast<std::size_t>(q) * time_nodes + idx];
    }

    /// Plane kind: value at (bin q, s_eval position a, t_eval position b).
    double plane_value(std::uint32_t q, std::uint32_t a, std::uint32_t b) const {
        return samples[(static_cast<std::size_t>(q) * s_eval.size() + a) * t_eval.size() + b];
    }
};

/// L^1_1(s, t; x_q) = (1/2eps) sum_{t_j < t} 1[|W(s,t_j) - x_q| <= eps] dt,
/// for all bins and all t simultaneously. Rejects the degenerate line s = 0.
LocalTimeField line_local_time(const SheetPath& path, std::uint32_t component,
                               std::uint32_t s_node, const XGrid& xgrid);

/// Same estimator for the transposed line s -> W(s,t) at fixed t (occupation
/// density in ds). Rejects t = 0.
LocalTimeField line2_local_time(const SheetPath& path, std::uint32_t component,
                                std::uint32_t t_node, const XGrid& xgrid);

/// Plane local time L^{x_q}(s,t) on the given (s,t) evaluation lattice:
/// (1/2eps) sum_{s_i < s} sum_{t_j < t} 1[|W(s_i,t_j) - x_q| <= eps] ds dt.
LocalTimeField plane_local_time(const SheetPath& path, std::uint32_t component,
                                const XGrid& xgrid, std::vector<std::uint32_t> s_eval,
                                std::vector<std::uint32_t> t_eval);

/// Quadrature of the one-parameter local time over lines: int_0^s L^1_1(sigma, t) dsigma
/// on the same (x-bin, s_eval, t_eval) layout as the plane field. Lines enter
/// with right endpoints (sigma in (0, s]), which keeps the degenerate sigma=0
/// line out of the estimator; the slab identity compares this against
/// plane_local_time, whose strip sums use left endpoints.
LocalTimeField integrated_line_local_time(const SheetPath& path, std::uint32_t component,
                                          const XGrid& xgrid, std::vector<std::uint32_t> s_eval,
                                          std::vector<std::uint32_t> t_eval);

/// Point estimate of the one-parameter local time at level x (exact window at
/// x, no binning).
double line_local_time_at(const SheetPath& path, std::uint32_t component, std::uint32_t s_node,
                          double x, double bandwidth, std::uint32_t t_node);

/// Point estimate of the plane local time at level x.
double plane_local_time_at(const SheetPath& path, std::uint32_t component, double x,
                           double bandwidth, std::uint32_t s_node, std::uint32_t t_node);

/// Residual of the one-parameter Tanaka identity at (s, t, x):
///   sum_{t_j < t} 1{W(s,t_j) <= x} (W(s,t_{j+1}) - W(s,t_j))
///     - [ (s/2) L^1_1(s,t;x) - (W(s,t) - x)^- + x^+ ].
double tanaka_residual(const SheetPath& path, std::uint32_t component, std::uint32_t s_node,
                       double x, std::uint32_t t_node, double bandwidth);

/// Residual of the single-line decomposition s L^1_1(s,t;x) = forward - backward
/// indicator integrals along the line (both sums share the bandwidth estimate).
double line_lt_identity_residual(const SheetPath& path, std::uint32_t component,
                                 std::uint32_t s_node, double x, std::uint32_t t_node,
                                 double bandwidth);

/// Residual of hatL(x,t) = L(s,1;x) - L(s,1-t;x) where hatL is the local time
/// of the reversed line. The reversed-line occupation sum uses right-endpoint
/// nodes (forward time on the reversed path runs backward on the original), so
/// the discrete identity holds bin-for-bin; the residual stays within one
/// time-step contribution in all cases.
double reversed_lt_check(const SheetPath& path, std::uint32_t component, std::uint32_t s_node,
                         double x, std::uint32_t t_node, double bandwidth);

/// CSV export of a field slice: columns (x, t[, s], value), plus a JSON
/// sidecar <filename>.meta.json with the bandwidth and grid parameters.
void export_local_time_csv(const LocalTimeField& field, const GridSpec& grid,
                           const std::string& filename);

}  // namespace sheetlab
