#include "sheetlab/stats.hpp"

#include <algorithm>
#include <stdexcept>

namespace sheetlab {

MeanSe mc_aggregate(const std::vector<double>& samples) {
    RunningStats acc;
    for (double x : samples) acc.add(x);
    return MeanSe{acc.mean(), acc.standard_error(), acc.count()};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double normal_pdf(double x) { return 0.39894228040143267794 * std::exp(-0.5 * x * x); }

double ks_statistic_normal(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic_normal: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = normal_cdf(samples[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(f - lo, hi - f));
    }
    return d;
}

bool ks_normal_test_5pct(std::vector<double> samples) {
    const double n = static_cast<double>(samples.size());
    const double critical = 1.3581 / std::sqrt(n);
    return ks_statistic_normal(std::move(samples)) <= critical;
}

LineFit weighted_least_squares(const std::vector<double>& x, const std::vector<double>& y,
                               const std::vector<double>& w) {
    if (x.size() != y.size() || x.size() != w.size()) {
        throw std::invalid_argument("weighted_least_squares: size mismatch");
    }
    double sw = 0.0, swx = 0.0, swy = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (w[i] <= 0.0) continue;
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
        ++used;
    }
    LineFit fit;
    fit.points = used;
    if (used < 2 || sw <= 0.0) return fit;
    const double xbar = swx / sw;
    const double ybar = swy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (w[i] <= 0.0) continue;
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
    }
    if (sxx <= 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (w[i] <= 0.0) continue;
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        rss += w[i] * r * r;
    }
    if (used > 2) {
        const double sigma2 = rss / static_cast<double>(used - 2);
        fit.slope_se = std::sqrt(sigma2 / sxx);
    }
    return fit;
}

double quantile(std::vector<double> samples, double q) {
    if (samples.empty()) throw std::invalid_argument("quantile: empty sample");
    if (q <= 0.0) return *std::min_element(samples.begin(), samples.end());
    if (q >= 1.0) return *std::max_element(samples.begin(), samples.end());
    std::sort(samples.begin(), samples.end());
    const double pos = q * static_cast<double>(samples.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= samples.size()) return samples.back();
    return samples[lo] * (1.0 - frac) + samples[lo + 1] * frac;
}

}  // namespace sheetlab
