#include "sheetlab/sheet.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "sheetlab/rng.hpp"

namespace sheetlab {

SheetPath SheetPath::sample(const GridSpec& grid, std::uint32_t dim, std::uint64_t seed) {
    if (dim == 0) throw std::invalid_argument("SheetPath: dim must be >= 1");
    SheetPath path(grid, dim, seed);
    Rng rng(seed);

    const std::uint32_t n = grid.n;
    const double cell_sd = std::sqrt(grid.ds() * grid.dt());
    std::vector<double>& v = path.values_;
    const std::size_t line_stride = static_cast<std::size_t>(n + 1) * dim;

    // Row i is the cumulative sum of row i-1 plus the new cells, so that
    // W(i,j) = W(i-1,j) + W(i,j-1) - W(i-1,j-1) + N(0, ds*dt).
    // Draw order is fixed (i, then j, then component) for reproducibility.
    for (std::uint32_t i = 1; i <= grid.m; ++i) {
        double* row = v.data() + i * line_stride;
        const double* prev = row - line_stride;
        for (std::uint32_t j = 1; j <= n; ++j) {
            for (std::uint32_t k = 0; k < dim; ++k) {
                const std::size_t here = static_cast<std::size_t>(j) * dim + k;
                const std::size_t left = here - dim;
                row[here] = prev[here] + row[left] - prev[left] + cell_sd * rng.gaussian();
            }
        }
    }
    return path;
}

SheetPath SheetPath::from_values(const GridSpec& grid, std::uint32_t dim, std::uint64_t seed,
                                 std::vector<double> values) {
    if (dim == 0) throw std::invalid_argument("SheetPath: dim must be >= 1");
    const std::size_t expected = static_cast<std::size_t>(grid.m + 1) * (grid.n + 1) * dim;
    if (values.size() != expected) {
        throw std::invalid_argument("SheetPath::from_values: wrong value count");
    }
    SheetPath path(grid, dim, seed);
    path.values_ = std::move(values);
    return path;
}

std::vector<double> rectangle_increment(const SheetPath& path, double s1, double t1, double s2,
                                        double t2) {
    const GridSpec& g = path.grid();
    const std::uint32_t i1 = g.s_index(s1), i2 = g.s_index(s2);
    const std::uint32_t j1 = g.t_index(t1), j2 = g.t_index(t2);
    if (i1 > i2 || j1 > j2) {
        throw std::invalid_argument("rectangle_increment: requires s1 <= s2 and t1 <= t2");
    }
    std::vector<double> inc(path.dim());
    for (std::uint32_t k = 0; k < path.dim(); ++k) {
        inc[k] = path.at(i2, j2, k) - path.at(i1, j2, k) - path.at(i2, j1, k) + path.at(i1, j1, k);
    }
    return inc;
}

SheetPath ReversedSheet::materialize() const {
    const GridSpec& g = grid();
    std::vector<double> values(static_cast<std::size_t>(g.m + 1) * (g.n + 1) * dim());
    std::size_t idx = 0;
    for (std::uint32_t i = 0; i <= g.m; ++i)
        for (std::uint32_t j = 0; j <= g.n; ++j)
            for (std::uint32_t k = 0; k < dim(); ++k) values[idx++] = at(i, j, k);
    return SheetPath::from_values(g, dim(), base_->seed(), std::move(values));
}

namespace {

std::uint32_t aligned_index(double value, std::uint32_t n, const char* what) {
    const double scaled = value * n;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-9 * n + 1e-12) {
        throw std::invalid_argument(std::string("window: ") + what + "=" + std::to_string(value) +
                                    " is not aligned to the t-grid (n=" + std::to_string(n) +
                                    "); nearest aligned value is " + std::to_string(rounded / n));
    }
    return static_cast<std::uint32_t>(rounded);
}

}  // namespace

WindowedSheet::WindowedSheet(const SheetPath& base, double a, double eps, WindowMode mode)
    : base_(&base), a_(a), eps_(eps), mode_(mode) {
    if (a < 0.0 || a >= 1.0 || eps <= 0.0 || eps > 1.0 || a + eps > 1.0 + 1e-12) {
        throw std::invalid_argument("window: need a in [0,1), eps in (0,1], a+eps <= 1");
    }
    const std::uint32_t n = base.grid().n;
    j0_ = aligned_index(a, n, "a");
    const std::uint32_t j1 = aligned_index(a + eps, n, "a+eps");
    if (j1 <= j0_) throw std::invalid_argument("window: empty window after alignment");
    jw_ = j1 - j0_;
}

ReversalDriftSheet::ReversalDriftSheet(const SheetPath& path, std::uint32_t component,
                                       std::uint32_t t_cut_index)
    : grid_(path.grid()), jcut_(t_cut_index) {
    const std::uint32_t n = grid_.n;
    if (jcut_ >= n) {
        throw std::invalid_argument(
            "extract_reversal_drift: t_cut must be a grid node < 1 (the drift integrand has a "
            "1/(1-u) singularity at u=1)");
    }
    const double dt = grid_.dt();
    values_.assign(static_cast<std::size_t>(grid_.m + 1) * (jcut_ + 1), 0.0);
    for (std::uint32_t i = 0; i <= grid_.m; ++i) {
        const double w_end = path.at(i, n, component);
        double drift = 0.0;  // left-endpoint sum of hatW(s,u)/(1-u) dt
        double* row = values_.data() + static_cast<std::size_t>(i) * (jcut_ + 1);
        row[0] = 0.0;  // hatW(s,0) = W(s,1), so B(s,0) = 0 identically
        for (std::uint32_t j = 1; j <= jcut_; ++j) {
            const double u_prev = grid_.t(j - 1);
            const double hat_prev = path.at(i, n - (j - 1), component);
            drift += hat_prev / (1.0 - u_prev) * dt;
            row[j] = path.at(i, n - j, component) - w_end + drift;
        }
    }
}

namespace {

void put_u32(std::FILE* f, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    std::fwrite(b, 1, 4, f);
}

void put_u64(std::FILE* f, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    std::fwrite(b, 1, 8, f);
}

std::uint32_t get_u32(std::FILE* f) {
    unsigned char b[4];
    if (std::fread(b, 1, 4, f) != 4) throw std::runtime_error("read_sheet: truncated header");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

std::uint64_t get_u64(std::FILE* f) {
    unsigned char b[8];
    if (std::fread(b, 1, 8, f) != 8) throw std::runtime_error("read_sheet: truncated header");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

constexpr std::uint32_t kSheetFormatVersion = 1;

}  // namespace

void write_sheet(const SheetPath& path, const std::string& filename) {
    std::FILE* f = std::fopen(filename.c_str(), "wb");
    if (!f) throw std::runtime_error("write_sheet: cannot open " + filename);
    std::fwrite("SHTL", 1, 4, f);
    put_u32(f, kSheetFormatVersion);
    put_u32(f, path.grid().m);
    put_u32(f, path.grid().n);
    put_u32(f, path.dim());
    put_u64(f, path.seed());
    for (double x : path.values()) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, 8);
        put_u64(f, bits);
    }
    std::fclose(f);
}

SheetPath read_sheet(const std::string& filename) {
    std::FILE* f = std::fopen(filename.c_str(), "rb");
    if (!f) throw std::runtime_error("read_sheet: cannot open " + filename);
    char magic[4];
    if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, "SHTL", 4) != 0) {
        std::fclose(f);
        throw std::runtime_error("read_sheet: bad magic in " + filename);
    }
    const std::uint32_t version = get_u32(f);
    if (version != kSheetFormatVersion) {
        std::fclose(f);
        throw std::runtime_error("read_sheet: unsupported version");
    }
    const std::uint32_t m = get_u32(f);
    const std::uint32_t n = get_u32(f);
    const std::uint32_t d = get_u32(f);
    const std::uint64_t seed = get_u64(f);
    GridSpec grid(m, n);
    std::vector<double> values(static_cast<std::size_t>(m + 1) * (n + 1) * d);
    for (double& x : values) {
        const std::uint64_t bits = get_u64(f);
        std::memcpy(&x, &bits, 8);
    }
    std::fclose(f);
    return SheetPath::from_values(grid, d, seed, std::move(values));
}

}  // namespace sheetlab
