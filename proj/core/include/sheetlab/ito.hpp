#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sheetlab/local_time.hpp"
#include "sheetlab/sheet.hpp"

namespace sheetlab {

/// Second-order process J(s,t) = sum over ordered cell pairs (u < v, xi > zeta)
/// of the product of their increments. Zero whenever s = 0 or t = 0.
///
/// The incremental build uses the closed form for the rectangle increment of J
/// at cell (i,j): (t-increment of W at line i-1) * (s-increment of W at row
/// j-1); J is its 2-D cumulative sum. A quadruple-loop oracle lives in the
/// tests for grids up to 32x32.
class JField {
  public:
    JField(const SheetPath& path, std::uint32_t component);

    const GridSpec& grid() const { return grid_; }
    double at(std::uint32_t i, std::uint32_t j) const {
        return values_[static_cast<std::size_t>(i) * (grid_.n + 1) + j];
    }
    /// Rectangle increment of J over cell (i,j), i.e. the 2-D difference.
    double cell_increment(std::uint32_t i, std::uint32_t j) const {
        return at(i, j) - at(i - 1, j) - at(i, j - 1) + at(i - 1, j - 1);
    }

  private:
    GridSpec grid_;
    std::vector<double> values_;
};

inline JField build_j_field(const SheetPath& path, std::uint32_t component) {
    return JField(path, component);
}

/// Thrown when a random integrand reads the path outside [0,s] x [0,t].
struct NonAdaptedAccess : std::logic_error {
    explicit NonAdaptedAccess(const std::string& what) : std::logic_error(what) {}
};

/// Guarded read access to a sheet for random integrands: reads are clipped to
/// the currently evaluated corner (s,t); anything beyond trips the guard.
class AdaptedPathView {
  public:
    explicit AdaptedPathView(const SheetPath& path) : path_(&path) {}

    void set_horizon(double s, double t) const {
        s_bound_ = s;
        t_bound_ = t;
    }

    double operator()(double s, double t, std::uint32_t k = 0) const {
        const GridSpec& g = path_->grid();
        if (s > s_bound_ + 1e-12 || t > t_bound_ + 1e-12) {
            throw NonAdaptedAccess("random integrand read W(" + std::to_string(s) + "," +
                                   std::to_string(t) + ") outside the adapted horizon (" +
                                   std::to_string(s_bound_) + "," + std::to_string(t_bound_) +
                                   ")");
        }
        return path_->at(g.s_index(s), g.t_index(t), k);
    }

    const SheetPath& path() const { return *path_; }

  private:
    const SheetPath* path_;
    mutable double s_bound_ = 0.0;
    mutable double t_bound_ = 0.0;
};

/// Random test function h(s,t,omega,x) with the declared partial derivatives
/// needed by the two-parameter change-of-variables identity. The omega
/// dependence goes through the guarded view; deterministic functions simply
/// ignore it.
struct RandomIntegrand {
    using Fn = std::function<double(double s, double t, const AdaptedPathView& w, double x)>;
    std::string name;
    Fn h;      // value
    Fn h_s;    // d/ds
    Fn h_x;    // d/dx
    Fn h_xx;   // d2/dx2
    Fn h_sx;   // d2/ds dx
    Fn h_xxx;  // d3/dx3
};

enum class ItoMode {
    smooth_substitution,  // local-time terms rewritten as path quadratures
    raw_local_time,       // local-time terms from estimated fields (noisy)
};

struct ItoTerms {
    double lhs = 0.0;             // h(s,t,W(s,t)) - h(0,t,0)
    double ds_term = 0.0;         // int_0^s dh/ds (u,t,W(u,t)) du
    double line_t_term = 0.0;     // (t/2) int_0^s hxx(u,t,W(u,t)) du
    double forward_term = 0.0;    // int int hx dW
    double j_term = 0.0;          // int int hxx dJ
    double third_term = 0.0;      // int_0^t { int_0^s (u/2) hxxx d_u W } dxi
    double l2_frozen = 0.0;       // (s/2) int_0^t hxx(s,xi,W(s,xi)) dxi
    double l2_running = 0.0;      // (1/2) int int hxx(u,xi,W(u,xi)) du dxi
    double residual_frozen = 0.0;
    double residual_running = 0.0;
    double residual_raw = 0.0;          // raw mode only
    double lt_terms_smooth = 0.0;       // l2_frozen + line-t + plane contributions, smooth route
    double lt_terms_raw = 0.0;          // same group from estimated fields
};

struct ItoRawParams {
    XGrid xgrid{-4.0, 4.0, 80, 0.08};
};

/// Residual of the two-parameter change-of-variables identity at (s,t).
///
/// Smooth-substitution mode turns every local-time integral into a path
/// quadrature via the calculus identities, leaving forward integrals plus a
/// J-Stieltjes sum. The printed identity freezes the first argument of the
/// (t-direction) local-time term at s; the variant with a running first
/// argument is evaluated as well and both residuals are reported.
///
/// Raw mode recomputes the three local-time terms from occupation-density
/// fields (2-D / 3-D Stieltjes sums against the estimated fields); it is a
/// noisy cross-check, not a substitute for the smooth route.
ItoTerms ito_residual(const RandomIntegrand& h, const SheetPath& path, std::uint32_t component,
                      std::uint32_t s_node, std::uint32_t t_node,
                      ItoMode mode = ItoMode::smooth_substitution,
                      const ItoRawParams& raw = {});

/// Mollification h_k(x) = sum_q w_q h(x - y_q/(k+1)) with gaussian quadrature
/// weights; all declared partials are mollified with the same rule.
RandomIntegrand mollify(const RandomIntegrand& h, std::uint32_t level);

/// The fixed polynomial test battery; spans every derivative slot.
std::vector<RandomIntegrand> ito_test_battery();

}  // namespace sheetlab
