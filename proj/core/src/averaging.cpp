#include "sheetlab/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include "sheetlab/rng.hpp"

namespace sheetlab {

namespace {

bool boxes_overlap(const Box& a, const Box& b) {
    if (a.t_lo >= b.t_hi || b.t_lo >= a.t_hi) return false;
    for (std::size_t k = 0; k < a.x_lo.size(); ++k) {
        if (a.x_lo[k] >= b.x_hi[k] || b.x_lo[k] >= a.x_hi[k]) return false;
    }
    return true;
}

}  // namespace

BoxSet::BoxSet(std::vector<Box> b) : boxes(std::move(b)) {
    for (const Box& box : boxes) {
        if (box.x_lo.size() != box.x_hi.size()) {
            throw std::invalid_argument("BoxSet: inconsistent box dimensions");
        }
        if (box.measure() < 0.0) throw std::invalid_argument("BoxSet: inverted box");
    }
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (i > 0 && boxes[i].x_lo.size() != boxes[0].x_lo.size()) {
            throw std::invalid_argument("BoxSet: mixed dimensions");
        }
        for (std::size_t j = i + 1; j < boxes.size(); ++j) {
            if (boxes_overlap(boxes[i], boxes[j])) {
                throw std::invalid_argument(
                    "BoxSet: boxes must be pairwise disjoint (measure arithmetic)");
            }
        }
    }
}

double BoxSet::measure() const {
    double total = 0.0;
    for (const Box& box : boxes) total += box.measure();
    return total;
}

bool BoxSet::contains(double t, std::span<const double> x) const {
    for (const Box& box : boxes) {
        if (box.contains(t, x)) return true;
    }
    return false;
}

DriftFunction DriftFunction::constant(double c, std::uint32_t dim) {
    if (std::abs(c) > 1.0) {
        throw std::invalid_argument("DriftFunction: |b| <= 1 required; constant " +
                                    std::to_string(c) + " rejected");
    }
    return DriftFunction("constant", [c](double, std::span<const double>) { return c; }, dim);
}

DriftFunction DriftFunction::floor_component(std::uint32_t comp, std::uint32_t dim) {
    if (comp >= dim) throw std::invalid_argument("DriftFunction: component out of range");
    return DriftFunction(
        "floor",
        [comp](double, std::span<const double> x) {
            return std::clamp(std::floor(x[comp]), -1.0, 1.0);
        },
        dim);
}

DriftFunction DriftFunction::sign_component(std::uint32_t comp, std::uint32_t dim) {
    if (comp >= dim) throw std::invalid_argument("DriftFunction: component out of range");
    return DriftFunction(
        "sign",
        [comp](double, std::span<const double> x) {
            return x[comp] > 0.0 ? 1.0 : (x[comp] < 0.0 ? -1.0 : 0.0);
        },
        dim);
}

DriftFunction DriftFunction::indicator_open_set(BoxSet u, std::uint32_t dim) {
    if (!u.boxes.empty() && u.boxes[0].x_lo.size() != dim) {
        throw std::invalid_argument("DriftFunction: box dimension mismatch");
    }
    auto set = std::make_shared<BoxSet>(std::move(u));
    return DriftFunction(
        "indicator",
        [set](double t, std::span<const double> x) { return set->contains(t, x) ? 1.0 : 0.0; },
        dim);
}

DriftFunction DriftFunction::random_step(std::uint64_t seed, std::uint32_t cells_per_axis,
                                         double range, std::uint32_t dim) {
    if (cells_per_axis == 0 || range <= 0.0) {
        throw std::invalid_argument("DriftFunction: random_step needs cells >= 1, range > 0");
    }
    const std::uint32_t cells = cells_per_axis;
    return DriftFunction(
        "random-step",
        [seed, cells, range, dim](double t, std::span<const double> x) {
            // Cell value = seeded hash of the lattice index; zero outside.
            std::uint64_t key = seed;
            const double tc = std::clamp(t, 0.0, 1.0);
            std::uint64_t idx =
                std::min<std::uint64_t>(static_cast<std::uint64_t>(tc * cells), cells - 1);
            key ^= splitmix64(idx += 0x9E3779B97F4A7C15ULL * 11);
            for (std::uint32_t k = 0; k < dim; ++k) {
                if (x[k] <= -range || x[k] >= range) return 0.0;
                const double frac = (x[k] + range) / (2.0 * range);
                std::uint64_t cell =
                    std::min<std::uint64_t>(static_cast<std::uint64_t>(frac * cells), cells - 1);
                cell += 0x632BE59BD9B4E019ULL * (k + 1);
                key ^= splitmix64(cell);
            }
            std::uint64_t state = key;
            const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
            return 2.0 * u - 1.0;
        },
        dim);
}

DriftFunction DriftFunction::custom(std::string name, Fn fn, std::uint32_t dim) {
    // Screen |b| <= 1 on a deterministic lattice plus seeded random probes.
    std::vector<double> x(dim);
    Rng rng(0x5EEDBA11);
    for (int probe = 0; probe < 4096; ++probe) {
        const double t = rng.uniform01();
        for (auto& xi : x) xi = 8.0 * (rng.uniform01() - 0.5);
        const double v = fn(t, x);
        if (!(std::abs(v) <= 1.0 + 1e-9)) {
            throw std::invalid_argument("DriftFunction: |b| <= 1 violated by '" + name +
                                        "' at a sampled point (value " + std::to_string(v) + ")");
        }
    }
    return DriftFunction(std::move(name), std::move(fn), dim);
}

DriftFunction DriftFunction::by_name(const std::string& name, std::uint32_t dim,
                                     std::uint64_t seed) {
    if (name == "zero") return constant(0.0, dim);
    if (name == "constant") return constant(0.5, dim);
    if (name == "floor") return floor_component(0, dim);
    if (name == "sign") return sign_component(0, dim);
    if (name == "random-step") return random_step(seed, 16, 4.0, dim);
    throw std::invalid_argument("DriftFunction: unknown built-in '" + name +
                                "' (known: zero, constant, floor, sign, random-step)");
}

TInterval TInterval::from_times(const GridSpec& grid, double a, double b) {
    TInterval I;
    I.j_lo = grid.t_index(a);
    I.j_hi = grid.t_index(b);
    if (I.j_lo >= I.j_hi) throw std::invalid_argument("TInterval: need a < b on the grid");
    return I;
}

TInterval TInterval::dyadic(const GridSpec& grid, std::uint32_t level, std::uint32_t k) {
    std::uint32_t max_level = 0;
    std::uint32_t n = grid.n;
    while (n % 2 == 0 && n > 1) {
        ++max_level;
        n /= 2;
    }
    if (level > max_level || (grid.n >> level) == 0 || grid.n % (1u << level) != 0) {
        throw std::invalid_argument("TInterval: dyadic level " + std::to_string(level) +
                                    " exceeds the grid resolution (max feasible level " +
                                    std::to_string(max_level) + " for n = " +
                                    std::to_string(grid.n) + ")");
    }
    if (k >= (1u << level)) throw std::invalid_argument("TInterval: k out of range");
    const std::uint32_t step = grid.n >> level;
    return TInterval{k * step, (k + 1) * step};
}

double averaging_transform(const DriftFunction& b, const SheetPath& path, const TInterval& I,
                           std::uint32_t s_node, std::span<const double> x) {
    const GridSpec& g = path.grid();
    const std::uint32_t d = path.dim();
    if (x.size() != d) throw std::invalid_argument("averaging_transform: x dimension mismatch");
    if (I.j_hi > g.n) throw std::invalid_argument("averaging_transform: interval off the grid");
    static thread_local std::vector<double> shifted;
    shifted.resize(d);
    const double dt = g.dt();
    const double* line = path.line(s_node);
    double acc = 0.0;
    for (std::uint32_t j = I.j_lo; j < I.j_hi; ++j) {
        for (std::uint32_t k = 0; k < d; ++k) {
            shifted[k] = x[k] + line[static_cast<std::size_t>(j) * d + k];
        }
        acc += b(g.t(j), shifted) * dt;
    }
    return acc;
}

double rho(const DriftFunction& b, const SheetPath& path, std::uint32_t level, std::uint32_t k,
           std::uint32_t s_node, std::span<const double> x, std::uint32_t s2_node,
           std::span<const double> x2) {
    const TInterval I = TInterval::dyadic(path.grid(), level, k);
    return averaging_transform(b, path, I, s2_node, x2) -
           averaging_transform(b, path, I, s_node, x);
}

double max_norm(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

namespace {

void check_window_params(const GridSpec& grid, double a, double eps, double s, double s_prime) {
    if (!(s > 0.0) || s > s_prime || s_prime > 1.0) {
        throw std::invalid_argument("davie: need 0 < s <= s' <= 1");
    }
    if (a < 0.0 || eps <= 0.0 || a + eps > 1.0 + 1e-12) {
        throw std::invalid_argument("davie: need a >= 0, eps > 0, a + eps <= 1");
    }
    (void)grid;
}

}  // namespace

DavieReport exp_moment_estimate(const DriftFunction& b, std::uint64_t replicas, double a,
                                double eps, double s, double s_prime, std::span<const double> y,
                                std::span<const double> alpha_ladder,
                                const DavieGridParams& params) {
    const GridSpec& grid = params.grid;
    check_window_params(grid, a, eps, s, s_prime);
    if (replicas == 0) throw std::invalid_argument("exp_moment_estimate: replicas >= 1");
    const double dist = max_norm(y) + std::sqrt(s_prime - s);
    if (!(dist > 0.0)) {
        throw std::invalid_argument("exp_moment_estimate: (s'-s, y) must not both vanish");
    }
    const std::uint32_t s_node = grid.s_index(s);
    const std::uint32_t s2_node = grid.s_index(s_prime);
    const std::uint32_t d = params.dim;
    if (y.size() != d) throw std::invalid_argument("exp_moment_estimate: y dimension mismatch");

    DavieReport report;
    report.a = a;
    report.eps = eps;
    report.s = s;
    report.s_prime = s_prime;
    report.x.assign(d, 0.0);
    report.x_prime.assign(y.begin(), y.end());
    report.replicas = replicas;

    const double scale = std::sqrt(eps * s) / dist;
    std::vector<double> stats(replicas);
    std::vector<double> zero(d, 0.0);
    for (std::uint64_t r = 0; r < replicas; ++r) {
        const SheetPath path =
            SheetPath::sample(grid, d, derive_seed(params.master_seed, r));
        const WindowedSheet w(path, a, eps, WindowMode::shifted);
        const std::uint32_t nw = w.window_steps();
        const double dtw = w.dt();
        static thread_local std::vector<double> xs, xs2;
        xs.resize(d);
        xs2.resize(d);
        double integral = 0.0;
        for (std::uint32_t j = 0; j < nw; ++j) {
            for (std::uint32_t k = 0; k < d; ++k) {
                xs[k] = zero[k] + w.at(s_node, j, k);
                xs2[k] = y[k] + w.at(s2_node, j, k);
            }
            const double tj = static_cast<double>(j) * dtw;
            integral += (b(tj, xs2) - b(tj, xs)) * dtw;
        }
        stats[r] = scale * std::abs(integral);
    }

    report.largest_stable_alpha = 0.0;
    for (double alpha : alpha_ladder) {
        MomentLadderRow row;
        row.alpha = alpha;
        RunningStats full, half;
        for (std::uint64_t r = 0; r < replicas; ++r) {
            const double e = std::exp(alpha * stats[r]);
            full.add(e);
            if (r < replicas / 2) half.add(e);
        }
        row.moment = full.mean();
        row.half_moment = half.mean();
        row.stable = std::isfinite(row.moment) && std::isfinite(row.half_moment) &&
                     std::abs(row.moment - row.half_moment) < 0.10 * std::abs(row.moment);
        if (row.stable) report.largest_stable_alpha = std::max(report.largest_stable_alpha, alpha);
        report.ladder.push_back(row);
    }
    return report;
}

DavieReport tail_curve(const DriftFunction& b, std::uint64_t replicas, double a, double a_prime,
                       double s, double s_prime, std::span<const double> x,
                       std::span<const double> x_prime, std::span<const double> eta_grid,
                       const DavieGridParams& params) {
    const GridSpec& grid = params.grid;
    const double eps = a_prime - a;
    check_window_params(grid, a, eps, s, s_prime);
    if (replicas == 0) throw std::invalid_argument("tail_curve: replicas >= 1");
    const std::uint32_t d = params.dim;
    if (x.size() != d || x_prime.size() != d) {
        throw std::invalid_argument("tail_curve: x dimension mismatch");
    }
    static thread_local std::vector<double> diff;
    diff.resize(d);
    for (std::uint32_t k = 0; k < d; ++k) diff[k] = x_prime[k] - x[k];
    const double dist = max_norm(diff) + std::sqrt(s_prime - s);
    if (!(dist > 0.0)) throw std::invalid_argument("tail_curve: (s,x) == (s',x')");

    const TInterval I = TInterval::from_times(grid, a, a_prime);
    const std::uint32_t s_node = grid.s_index(s);
    const std::uint32_t s2_node = grid.s_index(s_prime);

    DavieReport report;
    report.a = a;
    report.eps = eps;
    report.s = s;
    report.s_prime = s_prime;
    report.x.assign(x.begin(), x.end());
    report.x_prime.assign(x_prime.begin(), x_prime.end());
    report.replicas = replicas;
    report.eta_cutoff = 2.0 * std::sqrt(eps * s) / dist;

    const double scale = std::sqrt(s) / (std::sqrt(eps) * dist);
    std::vector<double> stats(replicas);
    for (std::uint64_t r = 0; r < replicas; ++r) {
        const SheetPath path =
            SheetPath::sample(grid, d, derive_seed(params.master_seed, r));
        const double rho_val = averaging_transform(b, path, I, s2_node, x_prime) -
                               averaging_transform(b, path, I, s_node, x);
        stats[r] = scale * std::abs(rho_val);
    }
    std::sort(stats.begin(), stats.end());

    std::vector<double> fit_x, fit_y, fit_w;
    for (double eta : eta_grid) {
        TailCurveRow row;
        row.eta = eta;
        const auto it = std::lower_bound(stats.begin(), stats.end(), eta);
        row.count = static_cast<std::uint64_t>(stats.end() - it);
        row.p_hat = static_cast<double>(row.count) / static_cast<double>(replicas);
        row.se = std::sqrt(row.p_hat * (1.0 - row.p_hat) / static_cast<double>(replicas));
        report.tail.push_back(row);
        if (row.count > 0) {
            fit_x.push_back(eta);
            fit_y.push_back(std::log(row.p_hat));
            fit_w.push_back(static_cast<double>(row.count));
        }
    }
    if (fit_x.size() >= 2) {
        report.tail_fit = weighted_least_squares(fit_x, fit_y, fit_w);
        report.alpha_hat = -report.tail_fit.slope;
        report.c_hat = std::exp(report.tail_fit.intercept);
        report.fit_done = true;
    }
    return report;
}

double modulus_scan(const DriftFunction& b, const SheetPath& path, const ModulusScanParams& p) {
    double c0 = 0.0;
    for (double level_max : modulus_scan_by_level(b, path, p)) c0 = std::max(c0, level_max);
    return c0;
}

std::vector<double> modulus_scan_by_level(const DriftFunction& b, const SheetPath& path,
                                          const ModulusScanParams& p) {
    const GridSpec& g = path.grid();
    const std::uint32_t d = path.dim();
    std::uint64_t pow4M = 1;
    for (std::uint32_t i = 0; i < p.depth; ++i) pow4M *= 4;
    if (g.m % pow4M != 0) {
        throw std::invalid_argument("modulus_scan: grid m must be divisible by 4^depth");
    }
    if (g.n % (1u << p.level_max) != 0) {
        throw std::invalid_argument("modulus_scan: grid n must be divisible by 2^level_max");
    }

    // Prefix table per (s-node, x) pair: P[j] = sum_{j'<j} b(t_j', x + W(s,t_j')) dt,
    // so any dyadic-interval transform is a prefix difference.
    using Key = std::pair<std::uint32_t, std::vector<long long>>;
    std::map<Key, std::vector<double>> prefix_cache;
    const double dt = g.dt();
    const double x_key_scale = static_cast<double>(1u << p.depth);

    auto prefix_for = [&](std::uint32_t s_node, const std::vector<double>& x)
        -> const std::vector<double>& {
        Key key;
        key.first = s_node;
        key.second.resize(d);
        for (std::uint32_t k = 0; k < d; ++k) {
            key.second[k] = static_cast<long long>(std::llround(x[k] * x_key_scale));
        }
        auto it = prefix_cache.find(key);
        if (it != prefix_cache.end()) return it->second;
        std::vector<double> pref(g.n + 1, 0.0);
        static thread_local std::vector<double> shifted;
        shifted.resize(d);
        const double* line = path.line(s_node);
        for (std::uint32_t j = 0; j < g.n; ++j) {
            for (std::uint32_t k = 0; k < d; ++k) {
                shifted[k] = x[k] + line[static_cast<std::size_t>(j) * d + k];
            }
            pref[j + 1] = pref[j] + b(g.t(j), shifted) * dt;
        }
        return prefix_cache.emplace(std::move(key), std::move(pref)).first->second;
    };

    Rng rng(p.seed);
    std::vector<double> by_level(p.depth, 0.0);
    std::vector<double> x(d), x2(d);
    for (std::uint32_t m_level = 1; m_level <= p.depth; ++m_level) {
        double& c0 = by_level[m_level - 1];
        std::uint64_t pow4 = 1;
        for (std::uint32_t i = 0; i < m_level; ++i) pow4 *= 4;
        const std::uint64_t pow2 = 1ull << m_level;
        const std::uint32_t s_stride = static_cast<std::uint32_t>(g.m / pow4);
        for (std::uint32_t q = 0; q < p.quadruples; ++q) {
            std::uint64_t i1 = 1 + rng.next_u64() % pow4;
            std::uint64_t i2 = 1 + rng.next_u64() % pow4;
            if (i1 > i2) std::swap(i1, i2);
            for (std::uint32_t k = 0; k < d; ++k) {
                const long long l1 =
                    static_cast<long long>(rng.next_u64() % (2 * pow2 + 1)) -
                    static_cast<long long>(pow2);
                const long long l2 =
                    static_cast<long long>(rng.next_u64() % (2 * pow2 + 1)) -
                    static_cast<long long>(pow2);
                x[k] = static_cast<double>(l1) / static_cast<double>(pow2);
                x2[k] = static_cast<double>(l2) / static_cast<double>(pow2);
            }
            static thread_local std::vector<double> dvec;
            dvec.resize(d);
            for (std::uint32_t k = 0; k < d; ++k) dvec[k] = x2[k] - x[k];
            const double s_val = static_cast<double>(i1) / static_cast<double>(pow4);
            const double s2_val = static_cast<double>(i2) / static_cast<double>(pow4);
            const double dist = max_norm(dvec) + std::sqrt(s2_val - s_val);
            if (!(dist > 0.0)) continue;
            const std::uint32_t s_node = static_cast<std::uint32_t>(i1) * s_stride;
            const std::uint32_t s2_node = static_cast<std::uint32_t>(i2) * s_stride;
            const std::vector<double>& pref1 = prefix_for(s_node, x);
            const std::vector<double>& pref2 = prefix_for(s2_node, x2);
            const double denom_base = std::sqrt(s_val) / dist;
            for (std::uint32_t level = 1; level <= p.level_max; ++level) {
                const std::uint32_t step = g.n >> level;
                const double pow_half = std::pow(2.0, 0.5 * static_cast<double>(level));
                const double denom = static_cast<double>(level) + log_plus(1.0 / dist);
                for (std::uint32_t k = 0; k < (1u << level); ++k) {
                    const std::uint32_t lo = k * step, hi = (k + 1) * step;
                    const double r = (pref2[hi] - pref2[lo]) - (pref1[hi] - pref1[lo]);
                    const double ratio = denom_base * std::abs(r) * pow_half / denom;
                    c0 = std::max(c0, ratio);
                }
            }
        }
    }
    return by_level;
}

IntervalModulusResult interval_modulus_check(const DriftFunction& b, const SheetPath& path,
                                             const TInterval& I,
                                             const std::vector<PointPair>& pairs) {
    const GridSpec& g = path.grid();
    const double len = I.length(g);
    IntervalModulusResult out;
    static thread_local std::vector<double> dvec;
    dvec.resize(path.dim());
    for (const PointPair& pair : pairs) {
        for (std::uint32_t k = 0; k < path.dim(); ++k) dvec[k] = pair.x2[k] - pair.x[k];
        const double dist =
            max_norm(dvec) + std::sqrt(g.s(pair.s2_node) - g.s(pair.s_node));
        if (!(dist > 0.0)) continue;
        const double num = std::abs(averaging_transform(b, path, I, pair.s2_node, pair.x2) -
                                    averaging_transform(b, path, I, pair.s_node, pair.x));
        const double den = std::sqrt(len) * (1.0 + log_plus(1.0 / (dist * len))) * dist;
        out.max_ratio = std::max(out.max_ratio, num * std::sqrt(g.s(pair.s_node)) / den);
    }

    // Integrated variant over dyadic cells when |I| is a dyadic fraction of the
    // grid: | int_{I_nl} (T_{I_nk}(s,x') - T_{I_nk}(s,x)) ds | against
    // 2^-n (n + log+ 1/|x'-x|) |x'-x|.
    const double level_real = std::log2(1.0 / len);
    const std::uint32_t level = static_cast<std::uint32_t>(std::lround(level_real));
    if (level >= 1 && std::abs(level_real - level) < 1e-9 && g.n % (1u << level) == 0 &&
        g.m % (1u << level) == 0) {
        const std::uint32_t cells = 1u << level;
        const std::uint32_t s_step = g.m / cells;
        for (const PointPair& pair : pairs) {
            for (std::uint32_t k = 0; k < path.dim(); ++k) dvec[k] = pair.x2[k] - pair.x[k];
            const double dx = max_norm(dvec);
            if (!(dx > 0.0)) continue;
            const double den = std::pow(2.0, -static_cast<double>(level)) *
                               (static_cast<double>(level) + log_plus(1.0 / dx)) * dx;
            for (std::uint32_t kk = 0; kk < cells; ++kk) {
                const TInterval ink = TInterval::dyadic(g, level, kk);
                for (std::uint32_t ll = 0; ll < cells; ++ll) {
                    double integral = 0.0;
                    for (std::uint32_t i = ll * s_step; i < (ll + 1) * s_step; ++i) {
                        integral += (averaging_transform(b, path, ink, i, pair.x2) -
                                     averaging_transform(b, path, ink, i, pair.x)) *
                                    g.ds();
                    }
                    out.max_ratio_integrated =
                        std::max(out.max_ratio_integrated, std::abs(integral) / den);
                }
            }
        }
    }
    return out;
}

double occupation_open_set(const BoxSet& u, const SheetPath& path,
                           const std::vector<std::uint32_t>& s_nodes,
                           const std::vector<std::vector<double>>& x_points) {
    const GridSpec& g = path.grid();
    const std::uint32_t d = path.dim();
    static thread_local std::vector<double> shifted;
    shifted.resize(d);
    double best = 0.0;
    for (std::uint32_t s_node : s_nodes) {
        const double* line = path.line(s_node);
        const double sqrt_s = std::sqrt(g.s(s_node));
        for (const std::vector<double>& x : x_points) {
            double occ = 0.0;
            for (std::uint32_t j = 0; j < g.n; ++j) {
                for (std::uint32_t k = 0; k < d; ++k) {
                    shifted[k] = x[k] + line[static_cast<std::size_t>(j) * d + k];
                }
                if (u.contains(g.t(j), shifted)) occ += g.dt();
            }
            best = std::max(best, sqrt_s * occ);
        }
    }
    return best;
}

RegularizationTable regularization_probe(const DriftFunction& b, const SheetPath& path,
                                         std::uint32_t s_node, std::span<const double> x,
                                         const std::vector<PointPair>& sequence) {
    const GridSpec& g = path.grid();
    const TInterval full{0, g.n};
    const double target = averaging_transform(b, path, full, s_node, x);
    RegularizationTable table;
    double running_max = 0.0;
    for (const PointPair& step : sequence) {
        RegularizationStep row;
        row.s = g.s(step.s_node);
        row.x = step.x;
        row.difference =
            std::abs(averaging_transform(b, path, full, step.s_node, step.x) - target);
        running_max = std::max(running_max, row.difference);
        table.steps.push_back(std::move(row));
    }
    const double last = table.steps.empty() ? 0.0 : table.steps.back().difference;
    table.pass = last <= 0.10 * running_max + 1e-12;
    return table;
}

CounterexampleResult counterexample_demo(std::uint64_t q_max, std::uint32_t quad_nodes) {
    // b(w(s,t)) with b = floor and w(s,t) = 1 - exp(-1/(t(1-s))) on [0,1)x(0,1],
    // w = 1 otherwise. For s < 1 and t > 0 the exponential is strictly positive,
    // so w < 1 analytically and floor(w) = 0; the guard below keeps that true
    // when exp underflows and 1 - exp(-z) rounds to 1.0.
    auto b_of_w = [](double s, double t) -> double {
        if (s >= 1.0 || t <= 0.0) return 1.0;  // w = 1 branch
        const double z = 1.0 / (t * (1.0 - s));
        const double w = 1.0 - std::exp(-z);
        return w >= 1.0 ? 0.0 : std::floor(w);
    };
    auto integral_at = [&](double s) {
        double acc = 0.0;
        const double h = 1.0 / static_cast<double>(quad_nodes);
        for (std::uint32_t r = 0; r < quad_nodes; ++r) {
            acc += b_of_w(s, (static_cast<double>(r) + 0.5) * h) * h;
        }
        return acc;
    };

    CounterexampleResult out;
    for (std::uint64_t q = 2; q < q_max; q *= 2) {
        const double s = 1.0 - 1.0 / static_cast<double>(q);
        out.table.emplace_back(s, integral_at(s));
    }
    const double s_last = 1.0 - 1.0 / static_cast<double>(q_max);
    out.table.emplace_back(s_last, integral_at(s_last));
    out.limit_estimate = out.table.back().second;
    out.value_at_1 = integral_at(1.0);
    return out;
}

}  // namespace sheetlab
