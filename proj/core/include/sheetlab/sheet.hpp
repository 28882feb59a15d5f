#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sheetlab/grid.hpp"

namespace sheetlab {

/// Grid samples of a d-dimensional Brownian sheet on [0,1]^2.
///
/// Values are exact in law at the grid nodes: each cell carries an independent
/// N(0, ds*dt) increment per component and the node values are the rectangular
/// cumulative sums, so the sheet vanishes identically on the boundary and any
/// rectangle increment over disjoint cells is an independent gaussian with
/// variance equal to the rectangle area.
///
/// Immutable after construction; safe to share read-only across workers.
class SheetPath {
  public:
    static SheetPath sample(const GridSpec& grid, std::uint32_t dim, std::uint64_t seed);

    /// Wraps externally produced node values (binary import, reversal views).
    /// The values must satisfy the boundary-zero convention; sized (m+1)*(n+1)*d.
    static SheetPath from_values(const GridSpec& grid, std::uint32_t dim, std::uint64_t seed,
                                 std::vector<double> values);

    const GridSpec& grid() const { return grid_; }
    std::uint32_t dim() const { return dim_; }
    std::uint64_t seed() const { return seed_; }

    double at(std::uint32_t i, std::uint32_t j, std::uint32_t k = 0) const {
        return values_[(static_cast<std::size_t>(i) * (grid_.n + 1) + j) * dim_ + k];
    }

    const std::vector<double>& values() const { return values_; }

    /// Pointer to the start of line i (fixed s-node), component-interleaved,
    /// stride dim() between consecutive t-nodes.
    const double* line(std::uint32_t i) const {
        return values_.data() + static_cast<std::size_t>(i) * (grid_.n + 1) * dim_;
    }

  private:
    SheetPath(GridSpec grid, std::uint32_t dim, std::uint64_t seed)
        : grid_(grid), dim_(dim), seed_(seed),
          values_(static_cast<std::size_t>(grid.m + 1) * (grid.n + 1) * dim, 0.0) {}

    GridSpec grid_;
    std::uint32_t dim_ = 1;
    std::uint64_t seed_ = 0;
    std::vector<double> values_;
};

/// W(]s1,s2] x ]t1,t2]) = W(s2,t2) - W(s1,t2) - W(s2,t1) + W(s1,t1), per component.
std::vector<double> rectangle_increment(const SheetPath& path, double s1, double t1, double s2,
                                        double t2);

/// Time reversal in t: hatW(s, j/n) = W(s, (n-j)/n). Pure index remap.
class ReversedSheet {
  public:
    explicit ReversedSheet(const SheetPath& base) : base_(&base) {}

    const GridSpec& grid() const { return base_->grid(); }
    std::uint32_t dim() const { return base_->dim(); }
    double at(std::uint32_t i, std::uint32_t j, std::uint32_t k = 0) const {
        return base_->at(i, base_->grid().n - j, k);
    }
    const SheetPath& base() const { return *base_; }

    /// Copies the remapped values into a standalone path (used by tests to
    /// check the involution bit-exactly and by estimators that want a plain
    /// SheetPath).
    SheetPath materialize() const;

  private:
    const SheetPath* base_;
};

inline ReversedSheet reverse_in_t(const SheetPath& path) { return ReversedSheet(path); }

enum class WindowMode {
    shifted,   // W^eps_{s,t}  = W_{s, a + eps t}
    centered,  // Wtil^eps_{s,t} = W_{s, a + eps t} - W_{s, a}
};

/// A window [a, a+eps] of the t-axis, reparametrised to window time in [0,1].
/// Window endpoints must land on base grid nodes; construction fails otherwise
/// with a message naming the nearest aligned choice.
class WindowedSheet {
  public:
    WindowedSheet(const SheetPath& base, double a, double eps, WindowMode mode);

    std::uint32_t window_steps() const { return jw_; }  // number of t-steps inside the window
    double dt() const { return 1.0 / static_cast<double>(jw_); }
    double a() const { return a_; }
    double eps() const { return eps_; }
    WindowMode mode() const { return mode_; }
    const SheetPath& base() const { return *base_; }

    /// Component k at (s-node i, window t-node jj), jj in [0, window_steps()].
    double at(std::uint32_t i, std::uint32_t jj, std::uint32_t k = 0) const {
        const double v = base_->at(i, j0_ + jj, k);
        return mode_ == WindowMode::shifted ? v : v - base_->at(i, j0_, k);
    }

  private:
    const SheetPath* base_;
    double a_ = 0.0, eps_ = 1.0;
    std::uint32_t j0_ = 0, jw_ = 0;
    WindowMode mode_ = WindowMode::shifted;
};

inline WindowedSheet window(const SheetPath& path, double a, double eps, WindowMode mode) {
    return WindowedSheet(path, a, eps, mode);
}

/// The sheet B extracted from the time-reversal drift representation,
///   B(s,t) = hatW(s,t) - W(s,1) + sum_{u<t} hatW(s,u)/(1-u) dt,
/// computed on [0,1] x [0, t_cut] with left-endpoint quadrature for the drift.
/// The integrand is singular at u = 1, so t_cut < 1 is mandatory.
class ReversalDriftSheet {
  public:
    ReversalDriftSheet(const SheetPath& path, std::uint32_t component, std::uint32_t t_cut_index);

    const GridSpec& grid() const { return grid_; }
    std::uint32_t t_cut_index() const { return jcut_; }
    double at(std::uint32_t i, std::uint32_t j) const {
        return values_[static_cast<std::size_t>(i) * (jcut_ + 1) + j];
    }
    /// Cell increment B(i,j) - B(i,j-1) along line i, needed by Stieltjes sums.
    double t_increment(std::uint32_t i, std::uint32_t j) const { return at(i, j + 1) - at(i, j); }

  private:
    GridSpec grid_;
    std::uint32_t jcut_ = 0;
    std::vector<double> values_;
};

inline ReversalDriftSheet extract_reversal_drift(const SheetPath& path, std::uint32_t component,
                                                 std::uint32_t t_cut_index) {
    return ReversalDriftSheet(path, component, t_cut_index);
}

/// Default reversal-drift truncation index: n - 16, clamped to at least 1.
inline std::uint32_t default_t_cut_index(const GridSpec& grid) {
    return grid.n > 16 ? grid.n - 16 : (grid.n > 1 ? grid.n - 1 : 1);
}

/// Binary path dump. Header: magic "SHTL", version u32, m u32, n u32, d u32,
/// seed u64; then (m+1)*(n+1)*d little-endian IEEE doubles, s-major, then t,
/// then component. Round-trips bit-exactly.
void write_sheet(const SheetPath& path, const std::string& filename);
SheetPath read_sheet(const std::string& filename);

}  // namespace sheetlab
