#include "dcm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dcm {

GridSpec::GridSpec(int dim_, double R_, int N_) : dim(dim_), R(R_), N(N_) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("GridSpec: dim must be 1..3");
    if (!(R > 0)) throw std::invalid_argument("GridSpec: R must be positive");
    if (N < 3 || N % 2 == 0) throw std::invalid_argument("GridSpec: N must be odd and >= 3");
}

std::size_t GridSpec::node_count() const {
    std::size_t c = 1;
    for (int d = 0; d < dim; ++d) c *= static_cast<std::size_t>(N);
    return c;
}

std::size_t GridSpec::flat(const std::array<int, 3>& idx) const {
    std::size_t f = 0;
    for (int d = 0; d < dim; ++d) f = f * N + static_cast<std::size_t>(idx[d]);
    return f;
}

std::array<int, 3> GridSpec::unflat(std::size_t f) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int d = dim - 1; d >= 0; --d) {
        idx[d] = static_cast<int>(f % N);
        f /= N;
    }
    return idx;
}

Vec GridSpec::point(const std::array<int, 3>& idx) const {
    Vec x = Vec::zero(dim);
    for (int d = 0; d < dim; ++d) x[d] = coord(idx[d]);
    return x;
}

bool GridSpec::contains(const Vec& x, double slack) const {
    for (int d = 0; d < dim; ++d)
        if (std::abs(x[d]) > R + slack) return false;
    return true;
}

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Cell locator: clamped base index and in-cell fraction in [0,1].
void locate(const GridSpec& s, const Vec& x, std::array<int, 3>& base,
            std::array<double, 3>& frac) {
    const double h = s.spacing();
    for (int d = 0; d < s.dim; ++d) {
        double t = (x[d] + s.R) / h;
        int i = static_cast<int>(std::floor(t));
        i = std::clamp(i, 0, s.N - 2);
        base[d] = i;
        frac[d] = std::clamp(t - i, 0.0, 1.0);
    }
}

} // namespace

double GridFn::interpolate(const Vec& x) const {
    if (!spec.contains(x, 1e-12 * (1.0 + spec.R)))
        throw std::domain_error("out of domain");
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0, 0, 0};
    locate(spec, x, base, frac);

    const int corners = 1 << spec.dim;
    double acc = 0.0;
    for (int c = 0; c < corners; ++c) {
        std::array<int, 3> idx = base;
        double w = 1.0;
        for (int d = 0; d < spec.dim; ++d) {
            if (c & (1 << d)) {
                idx[d] += 1;
                w *= frac[d];
            } else {
                w *= 1.0 - frac[d];
            }
        }
        double v = at(idx);
        if (std::isinf(v)) return kInf;
        acc += w * v;
    }
    return acc;
}

Vec GridFn::gradient(const Vec& x) const {
    if (!spec.contains(x, 1e-12 * (1.0 + spec.R)))
        throw std::domain_error("out of domain");
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0, 0, 0};
    locate(spec, x, base, frac);
    const double h = spec.spacing();

    // Partial derivative of the multilinear interpolant with base cell b.
    auto cell_partial = [&](std::array<int, 3> b, int axis) -> double {
        const int corners = 1 << spec.dim;
        double acc = 0.0;
        for (int c = 0; c < corners; ++c) {
            if (c & (1 << axis)) continue;
            std::array<int, 3> lo = b, hi = b;
            double w = 1.0;
            for (int d = 0; d < spec.dim; ++d) {
                if (d == axis) continue;
                if (c & (1 << d)) {
                    lo[d] += 1;
                    hi[d] += 1;
                    w *= frac[d];
                } else {
                    w *= 1.0 - frac[d];
                }
            }
            hi[axis] += 1;
            double vl = at(lo), vh = at(hi);
            if (std::isinf(vl) || std::isinf(vh)) return kInf;
            acc += w * (vh - vl) / h;
        }
        return acc;
    };

    Vec g = Vec::zero(spec.dim);
    const double edge_tol = 1e-12;
    for (int d = 0; d < spec.dim; ++d) {
        bool on_node = frac[d] < edge_tol || frac[d] > 1.0 - edge_tol;
        if (!on_node) {
            double v = cell_partial(base, d);
            if (std::isinf(v)) throw std::domain_error("out of domain");
            g[d] = v;
            continue;
        }
        // Node plane: one-sided derivatives bracket the axis subdifferential.
        // 0 is the minimal-norm choice when bracketed; otherwise the centered
        // estimate of the a.e. derivative.
        int i = (frac[d] > 0.5) ? base[d] + 1 : base[d];
        std::array<int, 3> bl = base, br = base;
        bl[d] = std::max(i - 1, 0);
        br[d] = std::min(i, spec.N - 2);
        double dm = cell_partial(bl, d);
        double dp = cell_partial(br, d);
        if (std::isinf(dm) && std::isinf(dp)) throw std::domain_error("out of domain");
        if (std::isinf(dm)) dm = dp;
        if (std::isinf(dp)) dp = dm;
        if (dm <= 0.0 && 0.0 <= dp)
            g[d] = 0.0;
        else
            g[d] = 0.5 * (dm + dp);
    }
    return g;
}

bool GridFn::has_finite() const {
    for (double v : values)
        if (std::isfinite(v)) return true;
    return false;
}

double GridFn::min_finite() const {
    double m = kInf;
    for (double v : values) m = std::min(m, v);
    return m;
}

double GridFn::max_slope() const {
    const double h = spec.spacing();
    double s = 0.0;
    const std::size_t total = spec.node_count();
    for (std::size_t f = 0; f < total; ++f) {
        if (!std::isfinite(values[f])) continue;
        auto idx = spec.unflat(f);
        for (int d = 0; d < spec.dim; ++d) {
            if (idx[d] + 1 >= spec.N) continue;
            auto j = idx;
            j[d] += 1;
            double w = values[spec.flat(j)];
            if (!std::isfinite(w)) continue;
            s = std::max(s, std::abs(w - values[f]) / h);
        }
    }
    return s;
}

bool GridFn::is_even_exact() const {
    const std::size_t total = spec.node_count();
    for (std::size_t f = 0; f < total; ++f) {
        auto idx = spec.unflat(f);
        std::array<int, 3> m = idx;
        for (int d = 0; d < spec.dim; ++d) m[d] = spec.N - 1 - idx[d];
        double a = values[f], b = values[spec.flat(m)];
        if (std::isinf(a) != std::isinf(b)) return false;
        if (std::isfinite(a) && a != b) return false;
    }
    return true;
}

void GridFn::symmetrize_even() {
    const std::size_t total = spec.node_count();
    for (std::size_t f = 0; f < total; ++f) {
        auto idx = spec.unflat(f);
        std::array<int, 3> m = idx;
        for (int d = 0; d < spec.dim; ++d) m[d] = spec.N - 1 - idx[d];
        std::size_t g = spec.flat(m);
        if (g < f) continue;  // canonical representative: smaller flat index
        values[g] = values[f];
    }
}

bool GridFn::is_discretely_convex(double tol) const {
    // Directions: axes plus all distinct diagonals (per dimension pair signs).
    std::vector<std::array<int, 3>> dirs;
    for (int d = 0; d < spec.dim; ++d) {
        std::array<int, 3> e{0, 0, 0};
        e[d] = 1;
        dirs.push_back(e);
    }
    if (spec.dim >= 2) {
        dirs.push_back({1, 1, 0});
        dirs.push_back({1, -1, 0});
    }
    if (spec.dim == 3) {
        dirs.push_back({1, 0, 1});
        dirs.push_back({1, 0, -1});
        dirs.push_back({0, 1, 1});
        dirs.push_back({0, 1, -1});
        dirs.push_back({1, 1, 1});
        dirs.push_back({1, -1, 1});
        dirs.push_back({1, 1, -1});
        dirs.push_back({1, -1, -1});
    }

    const std::size_t total = spec.node_count();
    for (std::size_t f = 0; f < total; ++f) {
        double v = values[f];
        if (!std::isfinite(v)) continue;
        auto idx = spec.unflat(f);
        for (const auto& e : dirs) {
            std::array<int, 3> p = idx, m = idx;
            bool ok = true;
            for (int d = 0; d < spec.dim; ++d) {
                p[d] += e[d];
                m[d] -= e[d];
                if (p[d] < 0 || p[d] >= spec.N || m[d] < 0 || m[d] >= spec.N) ok = false;
            }
            if (!ok) continue;
            double a = values[spec.flat(p)], b = values[spec.flat(m)];
            if (!std::isfinite(a) || !std::isfinite(b)) continue;
            if (v > 0.5 * (a + b) + tol * (1.0 + std::abs(v))) return false;
        }
    }
    return true;
}

} // namespace dcm
