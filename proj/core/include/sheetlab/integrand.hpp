#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sheetlab {

/// Step function on boxes (s_j, s_{j+1}] x (t_k, t_{k+1}] x (x_i, x_{i+1}]
/// with one coefficient per box; zero outside the knot ranges.
struct ElementaryFunction {
    std::vector<double> s_knots;  // strictly increasing, size ns+1
    std::vector<double> t_knots;  // size nt+1
    std::vector<double> x_knots;  // size nx+1
    std::vector<double> coef;     // [ix][js][kt], size nx*ns*nt

    ElementaryFunction(std::vector<double> s, std::vector<double> t, std::vector<double> x,
                       std::vector<double> c)
        : s_knots(std::move(s)), t_knots(std::move(t)), x_knots(std::move(x)), coef(std::move(c)) {
        check_knots(s_knots, "s");
        check_knots(t_knots, "t");
        check_knots(x_knots, "x");
        const std::size_t expected =
            (x_knots.size() - 1) * (s_knots.size() - 1) * (t_knots.size() - 1);
        if (coef.size() != expected) {
            throw std::invalid_argument("ElementaryFunction: coefficient count mismatch");
        }
    }

    std::size_t ns() const { return s_knots.size() - 1; }
    std::size_t nt() const { return t_knots.size() - 1; }
    std::size_t nx() const { return x_knots.size() - 1; }

    double coefficient(std::size_t ix, std::size_t js, std::size_t kt) const {
        return coef[(ix * ns() + js) * nt() + kt];
    }

    double operator()(double s, double t, double x) const {
        const auto js = cell(s_knots, s);
        const auto kt = cell(t_knots, t);
        const auto ix = cell(x_knots, x);
        if (js < 0 || kt < 0 || ix < 0) return 0.0;
        return coefficient(static_cast<std::size_t>(ix), static_cast<std::size_t>(js),
                           static_cast<std::size_t>(kt));
    }

  private:
    static void check_knots(const std::vector<double>& knots, const char* axis) {
        if (knots.size() < 2) {
            throw std::invalid_argument(std::string("ElementaryFunction: axis ") + axis +
                                        " needs at least 2 knots");
        }
        for (std::size_t i = 1; i < knots.size(); ++i) {
            if (!(knots[i] > knots[i - 1])) {
                throw std::invalid_argument(std::string("ElementaryFunction: knots on axis ") +
                                            axis + " must be strictly increasing");
            }
        }
    }

    // Index of the half-open cell (k_j, k_{j+1}] containing v, or -1.
    static long cell(const std::vector<double>& knots, double v) {
        if (v <= knots.front() || v > knots.back()) return -1;
        std::size_t lo = 0, hi = knots.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (v > knots[mid]) ? lo = mid : hi = mid;
        }
        return static_cast<long>(lo);
    }
};

/// Smooth scalar integrand f(s,t,x) with its declared x-derivative.
struct SmoothFunction {
    std::function<double(double, double, double)> f;
    std::function<double(double, double, double)> df_dx;  // may be empty when unused
};

/// Test function for the local-time-space machinery: either elementary or
/// smooth-with-derivative. Evaluation is total on [0,1]^2 x R.
class Integrand {
  public:
    enum class Kind { elementary, smooth };

    explicit Integrand(ElementaryFunction elem)
        : kind_(Kind::elementary), elem_(std::move(elem)) {}
    explicit Integrand(SmoothFunction smooth) : kind_(Kind::smooth), smooth_(std::move(smooth)) {
        if (!smooth_.f) throw std::invalid_argument("Integrand: smooth callable missing");
    }

    Kind kind() const { return kind_; }
    bool has_dx() const { return kind_ == Kind::elementary ? false : bool(smooth_.df_dx); }

    double operator()(double s, double t, double x) const {
        return kind_ == Kind::elementary ? elem_(s, t, x) : smooth_.f(s, t, x);
    }

    double dx(double s, double t, double x) const {
        if (!has_dx()) throw std::logic_error("Integrand: no declared x-derivative");
        return smooth_.df_dx(s, t, x);
    }

    const ElementaryFunction& elementary() const {
        if (kind_ != Kind::elementary) throw std::logic_error("Integrand: not elementary");
        return elem_;
    }

  private:
    Kind kind_;
    ElementaryFunction elem_{{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, {0.0}};
    SmoothFunction smooth_{};
};

/// Scalar function of (s, t, x) with x in R^d and declared partials d/dx_i.
struct SmoothFunctionNd {
    std::uint32_t dim = 1;
    std::function<double(double, double, std::span<const double>)> f;
    std::function<double(double, double, std::span<const double>, std::uint32_t)> df_dxi;
};

}  // namespace sheetlab
