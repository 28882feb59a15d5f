#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace sheetlab {

/// Numerically stable streaming mean/variance (Welford). Two accumulators can
/// be merged, so replica workers may reduce in any order.
class RunningStats {
  public:
    void add(double x) {
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }

    void merge(const RunningStats& o) {
        if (o.count_ == 0) return;
        if (count_ == 0) {
            *this = o;
            return;
        }
        const double total = static_cast<double>(count_ + o.count_);
        const double delta = o.mean_ - mean_;
        m2_ += o.m2_ + delta * delta * static_cast<double>(count_) *
                           static_cast<double>(o.count_) / total;
        mean_ += delta * static_cast<double>(o.count_) / total;
        count_ += o.count_;
    }

    std::uint64_t count() const { return count_; }
    double mean() const { return mean_; }

    /// Sample variance (divides by count-1). NaN for fewer than 2 samples.
    double variance() const {
        if (count_ < 2) return std::numeric_limits<double>::quiet_NaN();
        return m2_ / static_cast<double>(count_ - 1);
    }
    double stddev() const { return std::sqrt(variance()); }

    /// Standard error of the mean = sd / sqrt(count). NaN when not available.
    double standard_error() const {
        if (count_ < 2) return std::numeric_limits<double>::quiet_NaN();
        return stddev() / std::sqrt(static_cast<double>(count_));
    }

  private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct MeanSe {
    double mean = 0.0;
    double se = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t count = 0;
};

/// (mean, standard error, count) of a sample; se is NaN for count < 2.
MeanSe mc_aggregate(const std::vector<double>& samples);

double normal_cdf(double x);
double normal_pdf(double x);

/// One-sample Kolmogorov-Smirnov statistic against the standard normal.
double ks_statistic_normal(std::vector<double> samples);

/// KS test at the 5% level: statistic <= 1.3581 / sqrt(N).
bool ks_normal_test_5pct(std::vector<double> samples);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = std::numeric_limits<double>::quiet_NaN();
    std::size_t points = 0;
};

/// Weighted least squares y = a + b x; slope_se from the weighted residual
/// variance. Entries with weight <= 0 are ignored.
LineFit weighted_least_squares(const std::vector<double>& x, const std::vector<double>& y,
                               const std::vector<double>& w);

/// Empirical quantile (linear interpolation between order statistics).
double quantile(std::vector<double> samples, double q);

/// log+(z) = max(log z, 0), natural log; 0 for z <= 1 and for z <= 0.
inline double log_plus(double z) { return z > 1.0 ? std::log(z) : 0.0; }

}  // namespace sheetlab
