#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sheetlab/sheet.hpp"
#include "sheetlab/stats.hpp"

namespace sheetlab {

/// Axis-aligned box (t, x) in [0,1] x R^d; used for open-set descriptions.
struct Box {
    double t_lo = 0.0, t_hi = 1.0;
    std::vector<double> x_lo, x_hi;  // size d

    double measure() const {
        double v = t_hi - t_lo;
        for (std::size_t k = 0; k < x_lo.size(); ++k) v *= (x_hi[k] - x_lo[k]);
        return v;
    }
    bool contains(double t, std::span<const double> x) const {
        if (t <= t_lo || t >= t_hi) return false;
        for (std::size_t k = 0; k < x_lo.size(); ++k) {
            if (x[k] <= x_lo[k] || x[k] >= x_hi[k]) return false;
        }
        return true;
    }
};

/// Open set described as a finite union of pairwise-disjoint open boxes.
struct BoxSet {
    std::vector<Box> boxes;

    explicit BoxSet(std::vector<Box> b);
    double measure() const;
    bool contains(double t, std::span<const double> x) const;
};

/// Bounded Borel drift b(t,x) with |b| <= 1 everywhere. Built-ins guarantee
/// the bound by construction; custom callables are screened by sampling and
/// rejected if they exceed it.
class DriftFunction {
  public:
    using Fn = std::function<double(double t, std::span<const double> x)>;

    static DriftFunction constant(double c, std::uint32_t dim);
    /// floor(x_comp) clamped to [-1,1]: -1 for x<0, 0 on [0,1), 1 for x>=1.
    static DriftFunction floor_component(std::uint32_t comp, std::uint32_t dim);
    static DriftFunction sign_component(std::uint32_t comp, std::uint32_t dim);
    static DriftFunction indicator_open_set(BoxSet u, std::uint32_t dim);
    /// Seeded step function: i.i.d. values in [-1,1] on a lattice over
    /// [0,1] x [-range, range]^d, zero outside.
    static DriftFunction random_step(std::uint64_t seed, std::uint32_t cells_per_axis,
                                     double range, std::uint32_t dim);
    /// Custom drift; samples a lattice of points and rejects |b| > 1.
    static DriftFunction custom(std::string name, Fn fn, std::uint32_t dim);

    /// Built-in registry lookup ("constant", "floor", "sign", "random-step", "zero").
    static DriftFunction by_name(const std::string& name, std::uint32_t dim,
                                 std::uint64_t seed = 1);

    double operator()(double t, std::span<const double> x) const { return fn_(t, x); }
    const std::string& name() const { return name_; }
    std::uint32_t dim() const { return dim_; }

  private:
    DriftFunction(std::string name, Fn fn, std::uint32_t dim)
        : name_(std::move(name)), fn_(std::move(fn)), dim_(dim) {}

    std::string name_;
    Fn fn_;
    std::uint32_t dim_ = 1;
};

/// Grid-aligned sub-interval of [0,1] on the t-axis, stored as node indices.
struct TInterval {
    std::uint32_t j_lo = 0, j_hi = 0;  // [t(j_lo), t(j_hi)], j_lo < j_hi

    static TInterval from_times(const GridSpec& grid, double a, double b);
    /// Dyadic interval I_{nk} = [k 2^-n, (k+1) 2^-n]; fails (naming the largest
    /// feasible level) when 2^n does not divide the grid resolution.
    static TInterval dyadic(const GridSpec& grid, std::uint32_t level, std::uint32_t k);

    double length(const GridSpec& grid) const { return grid.t(j_hi) - grid.t(j_lo); }
};

/// T^W_I[b](s,x) = sum_{t_j in [I.lo, I.hi)} b(t_j, x + W(s,t_j)) dt.
double averaging_transform(const DriftFunction& b, const SheetPath& path, const TInterval& I,
                           std::uint32_t s_node, std::span<const double> x);

/// rho_{nk}(s,x; s',x') = T_{I_nk}[b](s',x') - T_{I_nk}[b](s,x).
double rho(const DriftFunction& b, const SheetPath& path, std::uint32_t level, std::uint32_t k,
           std::uint32_t s_node, std::span<const double> x, std::uint32_t s2_node,
           std::span<const double> x2);

/// max norm on R^d.
double max_norm(std::span<const double> x);

struct MomentLadderRow {
    double alpha = 0.0;
    double moment = 0.0;       // empirical E exp(alpha * scaled statistic)
    double half_moment = 0.0;  // same over the first half of the replicas
    bool stable = false;       // finite, and halving R moves it by < 10%
};

struct TailCurveRow {
    double eta = 0.0;
    std::uint64_t count = 0;  // exceedances
    double p_hat = 0.0;
    double se = 0.0;
};

/// Empirical data for the exponential-moment / tail experiments around the
/// averaging operator, plus the fitted log-tail decay.
struct DavieReport {
    // parameters
    double a = 0.0, eps = 0.0, s = 0.0, s_prime = 0.0;
    std::vector<double> x, x_prime;
    std::uint64_t replicas = 0;
    // exponential moments on the trial ladder
    std::vector<MomentLadderRow> ladder;
    double largest_stable_alpha = 0.0;
    // tail curve and weighted log-linear fit
    std::vector<TailCurveRow> tail;
    double eta_cutoff = 0.0;  // deterministic bound: the curve is exactly 0 beyond it
    LineFit tail_fit;         // slope = -alpha_hat_signed; see alpha_hat/c_hat
    double alpha_hat = 0.0;   // decay rate (positive when the tail decays)
    double c_hat = 0.0;       // exp(intercept)
    bool fit_done = false;
    // modulus statistic
    double c0_hat = 0.0;
};

struct DavieGridParams {
    GridSpec grid{4, 512};
    std::uint32_t dim = 1;
    std::uint64_t master_seed = 20240808;
};

/// Exponential moments of the window statistic
///   exp( alpha sqrt(eps s) / (|y| + sqrt(s'-s)) * |int_0^1 {b(t, y + W^eps_{s',t})
///        - b(t, W^eps_{s,t})} dt| )
/// on the trial alpha ladder, with a doubling-stability diagnostic per alpha.
DavieReport exp_moment_estimate(const DriftFunction& b, std::uint64_t replicas, double a,
                                double eps, double s, double s_prime, std::span<const double> y,
                                std::span<const double> alpha_ladder,
                                const DavieGridParams& params);

/// Empirical tail P( sqrt(s) |rho| >= eta sqrt(eps) (|x'-x| + sqrt(s'-s)) ) over
/// the eta grid, with the weighted least-squares fit of log p against eta on
/// the strictly-positive-count range (skipped, with the curve still emitted,
/// when no bin qualifies).
DavieReport tail_curve(const DriftFunction& b, std::uint64_t replicas, double a, double a_prime,
                       double s, double s_prime, std::span<const double> x,
                       std::span<const double> x_prime, std::span<const double> eta_grid,
                       const DavieGridParams& params);

struct ModulusScanParams {
    std::uint32_t depth = 6;           // dyadic level M
    std::uint32_t level_max = 4;       // deepest (n,k) interval family scanned
    std::uint32_t quadruples = 2000;   // subsample size per dyadic family
    std::uint64_t seed = 7;            // quadruple subsampling seed
};

/// Per-path modulus statistic: the maximum over scanned (n,k) and dyadic
/// quadruples of
///   sqrt(s) |rho_nk| 2^{n/2} / ( [n + log+ 1/D] D ),  D = |x'-x| + sqrt(s'-s).
double modulus_scan(const DriftFunction& b, const SheetPath& path, const ModulusScanParams& p);

/// Same scan, but returning the maximum ratio per dyadic family m = 1..depth;
/// the depth-M statistic is the running maximum of the first M entries.
std::vector<double> modulus_scan_by_level(const DriftFunction& b, const SheetPath& path,
                                          const ModulusScanParams& p);

struct PointPair {
    std::uint32_t s_node = 0, s2_node = 0;
    std::vector<double> x, x2;
};

struct IntervalModulusResult {
    double max_ratio = 0.0;             // pointwise bound ratio over the pairs
    double max_ratio_integrated = 0.0;  // integrated variant over I_{n l} x I_{n k}
};

/// Ratios |T_I[b](s',x') - T_I[b](s,x)| sqrt(s) / ( sqrt|I| [1 + log+ 1/(D|I|)] D )
/// over the supplied pairs, plus the integrated variant over dyadic cells at
/// the level matching |I|.
IntervalModulusResult interval_modulus_check(const DriftFunction& b, const SheetPath& path,
                                             const TInterval& I,
                                             const std::vector<PointPair>& pairs);

/// max over the (s,x)-scan of sqrt(s) * int_0^1 1_U(t, x + W(s,t)) dt.
double occupation_open_set(const BoxSet& u, const SheetPath& path,
                           const std::vector<std::uint32_t>& s_nodes,
                           const std::vector<std::vector<double>>& x_points);

struct RegularizationStep {
    double s = 0.0;
    std::vector<double> x;
    double difference = 0.0;  // |T(s_q,x_q) - T(s,x)| over I = [0,1]
};

struct RegularizationTable {
    std::vector<RegularizationStep> steps;
    bool pass = false;  // trend-to-zero diagnostic
};

/// Differences of the full-interval averaging transform along an approach
/// sequence to (s,x). Pass means the differences trend to zero: the last
/// step is within 10% of the running maximum (or everything is zero).
RegularizationTable regularization_probe(const DriftFunction& b, const SheetPath& path,
                                         std::uint32_t s_node, std::span<const double> x,
                                         const std::vector<PointPair>& sequence);

struct CounterexampleResult {
    double limit_estimate = 0.0;  // int_0^1 floor(w(s_q, t)) dt at the largest q
    double value_at_1 = 0.0;      // int_0^1 floor(w(1, t)) dt
    std::vector<std::pair<double, double>> table;  // (s_q, integral)
};

/// Deterministic continuity counterexample: w(s,t) = 1 - exp(-1/(t(1-s))) on
/// [0,1) x (0,1], w = 1 otherwise, with b = floor. The limit along s_q -> 1 is
/// 0 while the value at s = 1 is exactly 1.
CounterexampleResult counterexample_demo(std::uint64_t q_max = 1000000,
                                         std::uint32_t quad_nodes = 1024);

}  // namespace sheetlab
