#include "sheetlab/local_time.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace sheetlab {

namespace {

// Bin-center range [qlo, qhi] covered by the window [w-eps, w+eps]; empty when
// qlo > qhi. The window is closed, so boundaries get a tiny tolerance.
inline void window_bins(const XGrid& xg, double w, long& qlo, long& qhi) {
    const double dx = xg.dx();
    const double tol = 1e-12 * (1.0 + std::abs(w) + xg.bandwidth);
    qlo = static_cast<long>(std::ceil((w - xg.bandwidth - xg.x_min - tol) / dx - 0.5));
    qhi = static_cast<long>(std::floor((w + xg.bandwidth - xg.x_min + tol) / dx - 0.5));
    qlo = std::max(qlo, 0L);
    qhi = std::min(qhi, static_cast<long>(xg.p) - 1);
}

}  // namespace

LocalTimeField line_local_time(const SheetPath& path, std::uint32_t component,
                               std::uint32_t s_node, const XGrid& xgrid) {
    if (s_node == 0) {
        throw std::invalid_argument("line_local_time: s = 0 is degenerate (W identically 0)");
    }
    const GridSpec& g = path.grid();
    LocalTimeField field;
    field.kind = LtKind::line1;
    field.xgrid = xgrid;
    field.component = component;
    field.fixed_index = s_node;
    field.time_nodes = g.n + 1;
    field.samples.assign(static_cast<std::size_t>(xgrid.p) * (g.n + 1), 0.0);

    const double add = g.dt() / (2.0 * xgrid.bandwidth);
    // Column j+1 = column j plus the window count of node t_j (left endpoints).
    for (std::uint32_t j = 0; j < g.n; ++j) {
        const double w = path.at(s_node, j, component);
        long qlo, qhi;
        window_bins(xgrid, w, qlo, qhi);
        for (std::uint32_t q = 0; q < xgrid.p; ++q) {
            double* col = field.samples.data() + static_cast<std::size_t>(q) * field.time_nodes;
            col[j + 1] = col[j] + ((static_cast<long>(q) >= qlo && static_cast<long>(q) <= qhi)
                                       ? add
                                       : 0.0);
        }
    }
    return field;
}

LocalTimeField line2_local_time(const SheetPath& path, std::uint32_t component,
                                std::uint32_t t_node, const XGrid& xgrid) {
    if (t_node == 0) {
        throw std::invalid_argument("line2_local_time: t = 0 is degenerate (W identically 0)");
    }
    const GridSpec& g = path.grid();
    LocalTimeField field;
    field.kind = LtKind::line2;
    field.xgrid = xgrid;
    field.component = component;
    field.fixed_index = t_node;
    field.time_nodes = g.m + 1;
    field.samples.assign(static_cast<std::size_t>(xgrid.p) * (g.m + 1), 0.0);

    const double add = g.ds() / (2.0 * xgrid.bandwidth);
    for (std::uint32_t i = 0; i < g.m; ++i) {
        const double w = path.at(i, t_node, component);
        long qlo, qhi;
        window_bins(xgrid, w, qlo, qhi);
        for (std::uint32_t q = 0; q < xgrid.p; ++q) {
            double* col = field.samples.data() + static_cast<std::size_t>(q) * field.time_nodes;
            col[i + 1] = col[i] + ((static_cast<long>(q) >= qlo && static_cast<long>(q) <= qhi)
                                       ? add
                                       : 0.0);
        }
    }
    return field;
}

LocalTimeField plane_local_time(const SheetPath& path, std::uint32_t component,
                                const XGrid& xgrid, std::vector<std::uint32_t> s_eval,
                                std::vector<std::uint32_t> t_eval) {
    const GridSpec& g = path.grid();
    if (s_eval.empty() || t_eval.empty()) {
        throw std::invalid_argument("plane_local_time: empty evaluation lattice");
    }
    if (!std::is_sorted(s_eval.begin(), s_eval.end()) ||
        !std::is_sorted(t_eval.begin(), t_eval.end())) {
        throw std::invalid_argument("plane_local_time: evaluation lattice must be sorted");
    }
    if (s_eval.back() > g.m || t_eval.back() > g.n) {
        throw std::invalid_argument("plane_local_time: evaluation node outside grid");
    }

    LocalTimeField field;
    field.kind = LtKind::plane;
    field.xgrid = xgrid;
    field.component = component;
    field.s_eval = s_eval;
    field.t_eval = t_eval;
    const std::size_t na = s_eval.size(), nb = t_eval.size();
    field.samples.assign(static_cast<std::size_t>(xgrid.p) * na * nb, 0.0);

    const double cell_weight = g.ds() * g.dt() / (2.0 * xgrid.bandwidth);
    std::vector<double> strip(static_cast<std::size_t>(xgrid.p) * nb);

    std::uint32_t strip_begin = 0;
    for (std::size_t a = 0; a < na; ++a) {
        // Nodes with s-index in [strip_begin, s_eval[a]) enter at this level.
        std::fill(strip.begin(), strip.end(), 0.0);
        for (std::uint32_t i = strip_begin; i < s_eval[a]; ++i) {
            for (std::uint32_t j = 0; j < g.n; ++j) {
                const double w = path.at(i, j, component);
                long qlo, qhi;
                window_bins(xgrid, w, qlo, qhi);
                if (qlo > qhi) continue;
                // Node t_j counts toward every t_eval value strictly above j.
                const auto bpos = std::upper_bound(t_eval.begin(), t_eval.end(), j);
                if (bpos == t_eval.end()) continue;
                const std::size_t b0 = static_cast<std::size_t>(bpos - t_eval.begin());
                for (long q = qlo; q <= qhi; ++q) {
                    strip[static_cast<std::size_t>(q) * nb + b0] += cell_weight;
                }
            }
        }
        for (std::uint32_t q = 0; q < xgrid.p; ++q) {
            double running = 0.0;
            for (std::size_t b = 0; b < nb; ++b) {
                running += strip[static_cast<std::size_t>(q) * nb + b];
                const double below =
                    (a == 0) ? 0.0 : field.plane_value(q, static_cast<std::uint32_t>(a - 1),
                                                       static_cast<std::uint32_t>(b));
                field.samples[(static_cast<std::size_t>(q) * na + a) * nb + b] = below + running;
            }
        }
        strip_begin = s_eval[a];
    }
    return field;
}

LocalTimeField integrated_line_local_time(const SheetPath& path, std::uint32_t component,
                                          const XGrid& xgrid, std::vector<std::uint32_t> s_eval,
                                          std::vector<std::uint32_t> t_eval) {
    const GridSpec& g = path.grid();
    if (s_eval.empty() || t_eval.empty() || !std::is_sorted(s_eval.begin(), s_eval.end()) ||
        !std::is_sorted(t_eval.begin(), t_eval.end()) || s_eval.back() > g.m ||
        t_eval.back() > g.n) {
        throw std::invalid_argument("integrated_line_local_time: bad evaluation lattice");
    }
    LocalTimeField field;
    field.kind = LtKind::plane;
    field.xgrid = xgrid;
    field.component = component;
    field.s_eval = s_eval;
    field.t_eval = t_eval;
    const std::size_t na = s_eval.size(), nb = t_eval.size();
    field.samples.assign(static_cast<std::size_t>(xgrid.p) * na * nb, 0.0);

    const double weight = g.ds() * g.dt() / (2.0 * xgrid.bandwidth);
    std::vector<double> strip(static_cast<std::size_t>(xgrid.p) * nb);
    std::uint32_t strip_begin = 0;
    for (std::size_t a = 0; a < na; ++a) {
        std::fill(strip.begin(), strip.end(), 0.0);
        // Lines sigma with index in (strip_begin, s_eval[a]] (right endpoints).
        for (std::uint32_t i = strip_begin + 1; i <= s_eval[a]; ++i) {
            for (std::uint32_t j = 0; j < g.n; ++j) {
                const double w = path.at(i, j, component);
                long qlo, qhi;
                window_bins(xgrid, w, qlo, qhi);
                if (qlo > qhi) continue;
                const auto bpos = std::upper_bound(t_eval.begin(), t_eval.end(), j);
                if (bpos == t_eval.end()) continue;
                const std::size_t b0 = static_cast<std::size_t>(bpos - t_eval.begin());
                for (long q = qlo; q <= qhi; ++q) {
                    strip[static_cast<std::size_t>(q) * nb + b0] += weight;
                }
            }
        }
        for (std::uint32_t q = 0; q < xgrid.p; ++q) {
            double running = 0.0;
            for (std::size_t b = 0; b < nb; ++b) {
                running += strip[static_cast<std::size_t>(q) * nb + b];
                const double below =
                    (a == 0) ? 0.0 : field.plane_value(q, static_cast<std::uint32_t>(a - 1),
                                                       static_cast<std::uint32_t>(b));
                field.samples[(static_cast<std::size_t>(q) * na + a) * nb + b] = below + running;
            }
        }
        strip_begin = s_eval[a];
    }
    return field;
}

double line_local_time_at(const SheetPath& path, std::uint32_t component, std::uint32_t s_node,
                          double x, double bandwidth, std::uint32_t t_node) {
    if (s_node == 0) {
        throw std::invalid_argument("line_local_time_at: s = 0 is degenerate");
    }
    const GridSpec& g = path.grid();
    std::uint64_t count = 0;
    for (std::uint32_t j = 0; j < t_node; ++j) {
        if (std::abs(path.at(s_node, j, component) - x) <= bandwidth) ++count;
    }
    return static_cast<double>(count) * g.dt() / (2.0 * bandwidth);
}

double plane_local_time_at(const SheetPath& path, std::uint32_t component, double x,
                           double bandwidth, std::uint32_t s_node, std::uint32_t t_node) {
    const GridSpec& g = path.grid();
    std::uint64_t count = 0;
    for (std::uint32_t i = 0; i < s_node; ++i) {
        for (std::uint32_t j = 0; j < t_node; ++j) {
            if (std::abs(path.at(i, j, component) - x) <= bandwidth) ++count;
        }
    }
    return static_cast<double>(count) * g.ds() * g.dt() / (2.0 * bandwidth);
}

double tanaka_residual(const SheetPath& path, std::uint32_t component, std::uint32_t s_node,
                       double x, std::uint32_t t_node, double bandwidth) {
    if (s_node == 0) throw std::invalid_argument("tanaka_residual: s = 0 is degenerate");
    const GridSpec& g = path.grid();
    double forward = 0.0;
    for (std::uint32_t j = 0; j < t_node; ++j) {
        const double w = path.at(s_node, j, component);
        if (w <= x) forward += path.at(s_node, j + 1, component) - w;
    }
    const double lt = line_local_time_at(path, component, s_node, x, bandwidth, t_node);
    const double w_end = path.at(s_node, t_node, component);
    const double neg_part = std::max(x - w_end, 0.0);
    const double x_plus = std::max(x, 0.0);
    return forward - (0.5 * g.s(s_node) * lt - neg_part + x_plus);
}

double line_lt_identity_residual(const SheetPath& path, std::uint32_t component,
                                 std::uint32_t s_node, double x, std::uint32_t t_node,
                                 double bandwidth) {
    if (s_node == 0) throw std::invalid_argument("line_lt_identity_residual: s = 0");
    double forward = 0.0, backward = 0.0;
    for (std::uint32_t j = 0; j < t_node; ++j) {
        const double w0 = path.at(s_node, j, component);
        const double w1 = path.at(s_node, j + 1, component);
        if (w0 <= x) forward += w1 - w0;
        if (w1 <= x) backward += w1 - w0;
    }
    const double lt = line_local_time_at(path, component, s_node, x, bandwidth, t_node);
    return path.grid().s(s_node) * lt - (forward - backward);
}

double reversed_lt_check(const SheetPath& path, std::uint32_t component, std::uint32_t s_node,
                         double x, std::uint32_t t_node, double bandwidth) {
    if (s_node == 0) throw std::invalid_argument("reversed_lt_check: s = 0 is degenerate");
    const GridSpec& g = path.grid();
    const double scale = g.dt() / (2.0 * bandwidth);
    // Right-endpoint occupation sum on the reversed line.
    double reversed_lt = 0.0;
    for (std::uint32_t j = 1; j <= t_node; ++j) {
        const double hat_w = path.at(s_node, g.n - j, component);
        if (std::abs(hat_w - x) <= bandwidth) reversed_lt += scale;
    }
    const double full = line_local_time_at(path, component, s_node, x, bandwidth, g.n);
    const double upto = line_local_time_at(path, component, s_node, x, bandwidth, g.n - t_node);
    return reversed_lt - (full - upto);
}

void export_local_time_csv(const LocalTimeField& field, const GridSpec& grid,
                           const std::string& filename) {
    std::FILE* f = std::fopen(filename.c_str(), "w");
    if (!f) throw std::runtime_error("export_local_time_csv: cannot open " + filename);
    const XGrid& xg = field.xgrid;
    if (field.kind == LtKind::plane) {
        std::fprintf(f, "x,s,t,value\n");
        for (std::uint32_t q = 0; q < xg.p; ++q) {
            for (std::size_t a = 0; a < field.s_eval.size(); ++a) {
                for (std::size_t b = 0; b < field.t_eval.size(); ++b) {
                    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", xg.center(q),
                                 grid.s(field.s_eval[a]), grid.t(field.t_eval[b]),
                                 field.plane_value(q, static_cast<std::uint32_t>(a),
                                                   static_cast<std::uint32_t>(b)));
                }
            }
        }
    } else {
        const bool is_line1 = field.kind == LtKind::line1;
        std::fprintf(f, is_line1 ? "x,t,value\n" : "x,s,value\n");
        for (std::uint32_t q = 0; q < xg.p; ++q) {
            for (std::uint32_t idx = 0; idx < field.time_nodes; ++idx) {
                const double coord = is_line1 ? grid.t(idx) : grid.s(idx);
                std::fprintf(f, "%.17g,%.17g,%.17g\n", xg.center(q), coord,
                             field.line_value(q, idx));
            }
        }
    }
    std::fclose(f);

    nlohmann::json meta;
    meta["kind"] = field.kind == LtKind::plane ? "plane"
                   : field.kind == LtKind::line1 ? "line1"
                                                 : "line2";
    meta["x_min"] = xg.x_min;
    meta["x_max"] = xg.x_max;
    meta["bins"] = xg.p;
    meta["bandwidth"] = xg.bandwidth;
    meta["m"] = grid.m;
    meta["n"] = grid.n;
    meta["component"] = field.component;
    if (field.kind != LtKind::plane) meta["fixed_index"] = field.fixed_index;
    std::FILE* mf = std::fopen((filename + ".meta.json").c_str(), "w");
    if (!mf) throw std::runtime_error("export_local_time_csv: cannot open sidecar");
    const std::string text = meta.dump(2);
    std::fwrite(text.data(), 1, text.size(), mf);
    std::fputc('\n', mf);
    std::fclose(mf);
}

}  // namespace sheetlab
