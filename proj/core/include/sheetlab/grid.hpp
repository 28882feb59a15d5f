#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sheetlab {

/// Uniform rectangular grid on [0,1]^2 with m steps in s and n steps in t.
/// Nodes are (i/m, j/n) for 0 <= i <= m, 0 <= j <= n.
struct GridSpec {
    std::uint32_t m = 1;
    std::uint32_t n = 1;

    GridSpec() = default;
    GridSpec(std::uint32_t m_steps, std::uint32_t n_steps) : m(m_steps), n(n_steps) {
        if (m == 0 || n == 0) {
            throw std::invalid_argument("GridSpec: m and n must be >= 1");
        }
    }

    double ds() const { return 1.0 / static_cast<double>(m); }
    double dt() const { return 1.0 / static_cast<double>(n); }
    double s(std::uint32_t i) const { return static_cast<double>(i) / static_cast<double>(m); }
    double t(std::uint32_t j) const { return static_cast<double>(j) / static_cast<double>(n); }

    std::uint32_t num_s_nodes() const { return m + 1; }
    std::uint32_t num_t_nodes() const { return n + 1; }

    /// Index of an s-coordinate that must lie on the grid. Off-grid values are rejected.
    std::uint32_t s_index(double s_value) const { return node_index(s_value, m, "s"); }
    std::uint32_t t_index(double t_value) const { return node_index(t_value, n, "t"); }

    bool operator==(const GridSpec& o) const { return m == o.m && n == o.n; }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }

  private:
    static std::uint32_t node_index(double v, std::uint32_t steps, const char* axis) {
        const double scaled = v * static_cast<double>(steps);
        const double rounded = std::round(scaled);
        if (std::abs(scaled - rounded) > 1e-9 * static_cast<double>(steps) + 1e-12 ||
            rounded < 0.0 || rounded > static_cast<double>(steps)) {
            throw std::invalid_argument(std::string("GridSpec: coordinate ") + axis + "=" +
                                        std::to_string(v) + " is not a grid node (steps=" +
                                        std::to_string(steps) + ")");
        }
        return static_cast<std::uint32_t>(rounded);
    }
};

}  // namespace sheetlab
