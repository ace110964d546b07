#include "dcm/convex_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dcm {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// --- exact comparison of a1*b1 vs a2*b2 (fma error-free transforms) --------

int sign_prod_diff(double a1, double b1, double a2, double b2) {
    double p1 = a1 * b1, e1 = std::fma(a1, b1, -p1);
    double p2 = a2 * b2, e2 = std::fma(a2, b2, -p2);
    double s = p1 - p2;
    double bb = s - p1;
    double t = (p1 - (s - bb)) + (-p2 - bb);  // two-sum: p1 - p2 == s + t exactly
    double d = s + (t + (e1 - e2));
    return (d > 0) - (d < 0);
}

// --- 1-d discrete Legendre transform ----------------------------------------

// out[k] = max_j (xs[j]*ys[k] - f[j]) over finite f[j]; -inf when none.
// Lower-hull prune + monotone walk; values evaluated with a single rounding
// via fma so that subset maxima equal full maxima.
void conj1d(const std::vector<double>& xs, const std::vector<double>& f,
            const std::vector<double>& ys, std::vector<double>& out) {
    const int n = static_cast<int>(xs.size());
    const int m = static_cast<int>(ys.size());
    out.assign(m, -kInf);

    // Lower convex hull of (xs[j], f[j]) over the finite entries.
    static thread_local std::vector<int> hull;
    hull.clear();
    for (int j = 0; j < n; ++j) {
        if (!std::isfinite(f[j])) continue;
        while (hull.size() >= 2) {
            int a = hull[hull.size() - 2], b = hull[hull.size() - 1];
            // Keep b only when strictly below segment (a, j):
            // (f_b - f_a)(x_j - x_a) < (f_j - f_a)(x_b - x_a)
            if (sign_prod_diff(f[b] - f[a], xs[j] - xs[a], f[j] - f[a],
                               xs[b] - xs[a]) < 0)
                break;
            hull.pop_back();
        }
        hull.push_back(j);
    }
    if (hull.empty()) return;

    int p = 0;
    const int hs = static_cast<int>(hull.size());
    for (int k = 0; k < m; ++k) {
        const double y = ys[k];
        auto val = [&](int hidx) { return std::fma(xs[hull[hidx]], y, -f[hull[hidx]]); };
        while (p + 1 < hs && val(p + 1) >= val(p)) ++p;
        // ys ascend, so the maximizer index never moves left; it may need to
        // move further right for the next y only.
        out[k] = val(p);
    }
}

} // namespace

GridFn conjugate_grid(const GridFn& in, const GridSpec& target, bool even) {
    if (in.spec.dim != target.dim)
        throw std::invalid_argument("conjugate_grid: dimension mismatch");
    if (!in.has_finite()) throw std::domain_error("empty effective domain");

    const int n = in.spec.dim;
    std::vector<double> src_coords(in.spec.N), dst_coords(target.N);
    for (int i = 0; i < in.spec.N; ++i) src_coords[i] = in.spec.coord(i);
    for (int i = 0; i < target.N; ++i) dst_coords[i] = target.coord(i);

    std::vector<double> data = in.values;
    std::array<int, 3> dims{1, 1, 1};
    for (int d = 0; d < n; ++d) dims[d] = in.spec.N;

    for (int axis = n - 1; axis >= 0; --axis) {
        const bool first = (axis == n - 1);
        std::array<int, 3> ndims = dims;
        ndims[axis] = target.N;
        std::size_t nsz = 1;
        for (int d = 0; d < n; ++d) nsz *= static_cast<std::size_t>(ndims[d]);
        std::vector<double> next(nsz);

        // Row-major strides (axis 0 slowest).
        auto stride_of = [&](const std::array<int, 3>& dd, int ax) {
            std::size_t s = 1;
            for (int d = n - 1; d > ax; --d) s *= static_cast<std::size_t>(dd[d]);
            return s;
        };
        const std::size_t sstr = stride_of(dims, axis);
        const std::size_t dstr = stride_of(ndims, axis);

        std::vector<double> line(dims[axis]), oline;
        std::array<int, 3> it{0, 0, 0};
        for (;;) {
            // Base offset of the current line in both arrays.
            std::size_t sbase = 0, dbase = 0;
            {
                std::size_t smul = 1, dmul = 1;
                for (int d = n - 1; d >= 0; --d) {
                    if (d != axis) {
                        sbase += static_cast<std::size_t>(it[d]) * smul;
                        dbase += static_cast<std::size_t>(it[d]) * dmul;
                    }
                    smul *= static_cast<std::size_t>(dims[d]);
                    dmul *= static_cast<std::size_t>(ndims[d]);
                }
            }
            for (int j = 0; j < dims[axis]; ++j) {
                double v = data[sbase + static_cast<std::size_t>(j) * sstr];
                line[j] = first ? v : -v;
            }
            conj1d(src_coords, line, dst_coords, oline);
            for (int k = 0; k < ndims[axis]; ++k)
                next[dbase + static_cast<std::size_t>(k) * dstr] = oline[k];

            // Advance the multi-index over the non-axis dimensions.
            int d = n - 1;
            for (; d >= 0; --d) {
                if (d == axis) continue;
                if (++it[d] < dims[d]) break;
                it[d] = 0;
            }
            if (d < 0) break;
        }
        data.swap(next);
        dims = ndims;
    }

    GridFn out(target);
    out.values = std::move(data);
    // The multi-pass sweep leaves no -inf when some node was finite.
    for (double& v : out.values)
        if (v == -kInf) throw std::domain_error("empty effective domain");
    if (even) out.symmetrize_even();
    return out;
}

// --- catalog constructors ----------------------------------------------------

ConvexFunctionRep ConvexFunctionRep::quadratic(int dim, double a, double offset) {
    if (!(a > 0)) throw std::invalid_argument("quadratic: a must be positive");
    ConvexFunctionRep r;
    r.kind = Kind::Quadratic;
    r.dim = dim;
    r.quad_a = a;
    r.offset = offset;
    r.even = true;
    return r;
}

ConvexFunctionRep ConvexFunctionRep::scaled_norm(int dim, double c, double b) {
    if (!(c > 0)) throw std::invalid_argument("scaled_norm: c must be positive");
    ConvexFunctionRep r;
    r.kind = Kind::ScaledNorm;
    r.dim = dim;
    r.norm_c = c;
    r.offset = b;
    r.even = true;
    return r;
}

ConvexFunctionRep ConvexFunctionRep::body_indicator(const ConvexBody& K, double offset) {
    ConvexFunctionRep r;
    r.kind = Kind::BodyIndicator;
    r.dim = K.dim;
    r.offset = offset;
    r.body = std::make_shared<ConvexBody>(K);
    r.even = K.origin_symmetric;
    return r;
}

ConvexFunctionRep ConvexFunctionRep::support_fn(const ConvexBody& K, double offset) {
    ConvexFunctionRep r;
    r.kind = Kind::SupportFn;
    r.dim = K.dim;
    r.offset = offset;
    r.body = std::make_shared<ConvexBody>(K);
    r.even = K.origin_symmetric;
    return r;
}

ConvexFunctionRep ConvexFunctionRep::max_affine(int dim, std::vector<AffinePiece> pieces) {
    if (pieces.empty()) throw std::invalid_argument("max_affine: no pieces");
    ConvexFunctionRep r;
    r.kind = Kind::MaxAffine;
    r.dim = dim;
    r.pieces = std::move(pieces);
    for (auto& p : r.pieces) p.slope.dim = dim;
    return r;
}

ConvexFunctionRep ConvexFunctionRep::grid_sampled(GridFn g, bool even, bool validated) {
    if (validated) {
        if (!g.is_discretely_convex())
            throw std::invalid_argument("grid_sampled: values fail the discrete convexity test");
        if (even && !g.is_even_exact())
            throw std::invalid_argument("grid_sampled: even flag set but values not symmetric");
    }
    ConvexFunctionRep r;
    r.kind = Kind::Grid;
    r.dim = g.spec.dim;
    r.even = even;
    r.grid = std::move(g);
    return r;
}

// --- evaluation ---------------------------------------------------------------

ExtReal ConvexFunctionRep::evaluate(const Vec& x) const {
    switch (kind) {
        case Kind::Grid: {
            double v = grid.interpolate(x);
            return std::isinf(v) ? ExtReal::infinity() : ExtReal(v);
        }
        case Kind::Quadratic:
            return ExtReal(0.5 * quad_a * norm2(x) + offset);
        case Kind::ScaledNorm:
            return ExtReal(offset + norm_c * norm(x));
        case Kind::BodyIndicator:
            return body->contains(x, 1e-12 * (1.0 + body->circumradius()))
                       ? ExtReal(offset)
                       : ExtReal::infinity();
        case Kind::SupportFn:
            return ExtReal(body->support(x) + offset);
        case Kind::MaxAffine: {
            double v = -kInf;
            for (const auto& p : pieces) v = std::max(v, dot(p.slope, x) + p.offset);
            return ExtReal(v);
        }
    }
    throw std::logic_error("unreachable");
}

Vec ConvexFunctionRep::gradient(const Vec& x) const {
    switch (kind) {
        case Kind::Grid:
            return grid.gradient(x);
        case Kind::Quadratic:
            return x * quad_a;
        case Kind::ScaledNorm: {
            double n = norm(x);
            // minimal-norm subgradient of c|x| at the origin is 0
            return n > 0 ? x * (norm_c / n) : Vec::zero(dim);
        }
        case Kind::BodyIndicator:
            if (!body->contains(x, 1e-12 * (1.0 + body->circumradius())))
                throw std::domain_error("out of domain");
            // normal cone contains 0 everywhere on K
            return Vec::zero(dim);
        case Kind::SupportFn:
            return body->support_gradient(x);
        case Kind::MaxAffine: {
            double best = -kInf;
            for (const auto& p : pieces) best = std::max(best, dot(p.slope, x) + p.offset);
            double scale = 1.0 + std::abs(best) + norm(x);
            std::vector<Vec> arg;
            for (const auto& p : pieces)
                if (dot(p.slope, x) + p.offset >= best - 1e-12 * scale)
                    arg.push_back(p.slope);
            if (arg.size() == 1) return arg[0];
            return min_norm_point(arg);
        }
    }
    throw std::logic_error("unreachable");
}

double ConvexFunctionRep::min_value() const {
    switch (kind) {
        case Kind::Grid:
            return grid.min_finite();
        case Kind::Quadratic:
        case Kind::ScaledNorm:
        case Kind::BodyIndicator:
            return offset;
        case Kind::SupportFn: {
            // h_K >= 0 with equality at 0 when the origin lies in K;
            // otherwise minimize over a coarse-to-fine search.
            if (body->contains(Vec::zero(dim), 0.0)) return offset;
            break;
        }
        case Kind::MaxAffine:
            break;
    }
    return evaluate(argmin()).value();
}

Vec ConvexFunctionRep::argmin() const {
    switch (kind) {
        case Kind::Grid: {
            std::size_t best = 0;
            double bv = kInf;
            for (std::size_t i = 0; i < grid.values.size(); ++i)
                if (grid.values[i] < bv) {
                    bv = grid.values[i];
                    best = i;
                }
            return grid.spec.point(grid.spec.unflat(best));
        }
        case Kind::Quadratic:
        case Kind::ScaledNorm:
            return Vec::zero(dim);
        case Kind::BodyIndicator:
            if (body->contains(Vec::zero(dim), 0.0)) return Vec::zero(dim);
            return body->vertices.empty() ? Vec::zero(dim) : body->vertices[0];
        case Kind::SupportFn:
            if (body->contains(Vec::zero(dim), 0.0)) return Vec::zero(dim);
            break;
        case Kind::MaxAffine:
            break;
    }
    // Deterministic coarse-to-fine search for the catalog leftovers.
    Vec center = Vec::zero(dim);
    double R = suggested_box_radius(64.0);
    if (!std::isfinite(R)) R = 64.0;
    for (int round = 0; round < 24; ++round) {
        Vec best = center;
        double bv = evaluate(center).raw();
        const int side = 5;
        std::array<int, 3> it{0, 0, 0};
        for (;;) {
            Vec p = center;
            for (int d = 0; d < dim; ++d) p[d] += (it[d] - side / 2) * (R / 2.0);
            double v = evaluate(p).raw();
            if (v < bv) {
                bv = v;
                best = p;
            }
            int d = dim - 1;
            for (; d >= 0; --d) {
                if (++it[d] < side) break;
                it[d] = 0;
            }
            if (d < 0) break;
        }
        center = best;
        R *= 0.45;
    }
    return center;
}

double ConvexFunctionRep::suggested_box_radius(double drop) const {
    switch (kind) {
        case Kind::Grid:
            return grid.spec.R;
        case Kind::Quadratic:
            return std::sqrt(std::max(2.0 * (drop) / quad_a, 1e-6));
        case Kind::ScaledNorm:
            return std::max(drop / norm_c, 1e-6);
        case Kind::BodyIndicator:
            return body->circumradius() * (1.0 + 1e-9);
        case Kind::SupportFn: {
            if (!body->origin_interior) return kInf;
            return drop / body->inradius();
        }
        case Kind::MaxAffine: {
            // phi(x) >= rho * |x| + min offset where rho is the inradius of
            // the slope hull (when the origin is interior).
            std::vector<Vec> s;
            for (const auto& p : pieces) s.push_back(p.slope);
            double omin = pieces[0].offset;
            for (const auto& p : pieces) omin = std::min(omin, p.offset);
            try {
                ConvexBody hullb = ConvexBody::from_vertices(dim, s);
                if (!hullb.origin_interior) return kInf;
                return (drop - omin) / hullb.inradius();
            } catch (const std::invalid_argument&) {
                return kInf;
            }
        }
    }
    return kInf;
}

double ConvexFunctionRep::conjugate_domain_bound() const {
    switch (kind) {
        case Kind::Grid:
            return grid.max_slope();
        case Kind::Quadratic:
            return kInf;
        case Kind::ScaledNorm:
            return norm_c;
        case Kind::BodyIndicator:
            return kInf;  // conjugate is a support function
        case Kind::SupportFn:
            return body->circumradius();
        case Kind::MaxAffine: {
            double r = 0;
            for (const auto& p : pieces) r = std::max(r, norm(p.slope));
            return r;
        }
    }
    return kInf;
}

bool ConvexFunctionRep::has_bounded_domain() const {
    if (kind == Kind::BodyIndicator) return true;
    if (kind == Kind::Grid) return true;  // box-bounded by construction
    return false;
}

double ConvexFunctionRep::domain_radius() const {
    if (kind == Kind::BodyIndicator) return body->circumradius();
    if (kind == Kind::Grid) return grid.spec.R * std::sqrt(static_cast<double>(dim));
    return kInf;
}

// --- conjugation ---------------------------------------------------------------

namespace {

// Exact conjugate of a max-affine function: the lower convex hull of the
// lifted points (slope, -offset), +inf outside the slope hull.
GridFn max_affine_conjugate_grid(const ConvexFunctionRep& rep, const GridSpec& target) {
    const int n = rep.dim;
    GridFn out(target);

    if (n == 1) {
        std::vector<Vec> lifted;
        for (const auto& p : rep.pieces) lifted.push_back(Vec(p.slope[0], -p.offset));
        std::sort(lifted.begin(), lifted.end(), [](const Vec& a, const Vec& b) {
            if (a[0] != b[0]) return a[0] < b[0];
            return a[1] < b[1];
        });
        std::vector<Vec> lower;
        for (const auto& p : lifted) {
            if (!lower.empty() && p[0] == lower.back()[0]) continue;  // keep min y
            while (lower.size() >= 2) {
                const Vec &a = lower[lower.size() - 2], &b = lower.back();
                double cr = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
                if (cr > 0) break;  // b strictly below chord a-p
                lower.pop_back();
            }
            lower.push_back(p);
        }
        const double lo = lower.front()[0], hi = lower.back()[0];
        const double slack = 1e-12 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
        for (int i = 0; i < target.N; ++i) {
            double y = target.coord(i);
            if (y < lo - slack || y > hi + slack) {
                out.values[static_cast<std::size_t>(i)] = kInf;
                continue;
            }
            double yc = std::clamp(y, lo, hi);
            double v = lower.back()[1];
            for (std::size_t k = 0; k + 1 < lower.size(); ++k) {
                if (yc <= lower[k + 1][0]) {
                    double x0 = lower[k][0], x1 = lower[k + 1][0];
                    double t = x1 > x0 ? (yc - x0) / (x1 - x0) : 0.0;
                    v = lower[k][1] + t * (lower[k + 1][1] - lower[k][1]);
                    break;
                }
            }
            out.values[static_cast<std::size_t>(i)] = v;
        }
        return out;
    }

    if (n == 2) {
        // Lift to 3-d, take the hull, evaluate via the max over downward facets.
        std::vector<Vec> lifted, slopes;
        for (const auto& p : rep.pieces) {
            lifted.push_back(Vec(p.slope[0], p.slope[1], -p.offset));
            slopes.push_back(Vec(p.slope[0], p.slope[1]));
        }
        // Add a top lid so the hull is full-dimensional even for few pieces.
        double zmax = 0, rmax = 0;
        for (const auto& p : lifted) {
            zmax = std::max(zmax, std::abs(p[2]));
            rmax = std::max(rmax, std::hypot(p[0], p[1]));
        }
        double lid = zmax + rmax + 1.0;
        for (const auto& s : slopes) lifted.push_back(Vec(s[0], s[1], lid));

        auto tris = convex_hull_3d(lifted);
        ConvexBody hull2 = ConvexBody::from_vertices(2, slopes);

        struct Plane {
            double gx, gy, c;
        };
        std::vector<Plane> lower;
        for (const auto& t : tris) {
            const Vec &a = lifted[t.a], &b = lifted[t.b], &c = lifted[t.c];
            Vec nrm = cross(b - a, c - a);
            if (nrm[2] >= -1e-14) continue;  // keep downward-facing facets
            // plane: nrm . (x - a) = 0  ->  z = (nrm.a - nx x - ny y)/nz
            lower.push_back({-nrm[0] / nrm[2], -nrm[1] / nrm[2],
                             (dot(nrm, a)) / nrm[2]});
        }
        if (lower.empty()) throw std::invalid_argument("max_affine conjugate: degenerate slopes");

        const double slack = 1e-9 * (1.0 + hull2.circumradius());
        for (std::size_t fidx = 0; fidx < out.values.size(); ++fidx) {
            auto idx = target.unflat(fidx);
            Vec y = target.point(idx);
            if (!hull2.contains(y, slack)) {
                out.values[fidx] = kInf;
                continue;
            }
            double v = -kInf;
            for (const auto& pl : lower) v = std::max(v, pl.gx * y[0] + pl.gy * y[1] + pl.c);
            out.values[fidx] = v;
        }
        return out;
    }

    // n == 3: sample the max-affine function on a primal grid and sweep.
    double rmax = 0;
    for (const auto& p : rep.pieces) rmax = std::max(rmax, norm(p.slope));
    double rp = rep.suggested_box_radius(8.0 * (1.0 + rmax));
    if (!std::isfinite(rp)) throw std::invalid_argument("max_affine conjugate: unbounded domain");
    GridSpec primal(n, rp, std::max(65, target.N));
    GridFn sampled(primal);
    for (std::size_t f = 0; f < sampled.values.size(); ++f)
        sampled.values[f] = rep.evaluate(primal.point(primal.unflat(f))).raw();
    return conjugate_grid(sampled, target, rep.even);
}

} // namespace

ConvexFunctionRep conjugate(const ConvexFunctionRep& rep, const GridSpec& target) {
    switch (rep.kind) {
        case ConvexFunctionRep::Kind::Quadratic:
            return ConvexFunctionRep::quadratic(rep.dim, 1.0 / rep.quad_a, -rep.offset);
        case ConvexFunctionRep::Kind::ScaledNorm:
            return ConvexFunctionRep::body_indicator(
                ConvexBody::ball(rep.norm_c, rep.dim), -rep.offset);
        case ConvexFunctionRep::Kind::BodyIndicator:
            return ConvexFunctionRep::support_fn(*rep.body, -rep.offset);
        case ConvexFunctionRep::Kind::SupportFn:
            return ConvexFunctionRep::body_indicator(*rep.body, -rep.offset);
        case ConvexFunctionRep::Kind::MaxAffine: {
            GridFn g = max_affine_conjugate_grid(rep, target);
            if (rep.even) g.symmetrize_even();
            return ConvexFunctionRep::grid_sampled(std::move(g), rep.even, false);
        }
        case ConvexFunctionRep::Kind::Grid: {
            GridFn g = conjugate_grid(rep.grid, target, rep.even);
            return ConvexFunctionRep::grid_sampled(std::move(g), rep.even, false);
        }
    }
    throw std::logic_error("unreachable");
}

ConvexFunctionRep convexify(const ConvexFunctionRep& rep) {
    if (rep.kind != ConvexFunctionRep::Kind::Grid) return rep;  // catalog entries are convex
    const GridSpec& spec = rep.grid.spec;
    double slope = rep.grid.max_slope();
    if (!(slope > 0)) slope = 1e-6;
    GridSpec dual(spec.dim, slope, spec.N);
    GridFn star = conjugate_grid(rep.grid, dual, rep.even);
    GridFn env = conjugate_grid(star, spec, rep.even);
    return ConvexFunctionRep::grid_sampled(std::move(env), rep.even, false);
}

GridFn sample_on_grid(const ConvexFunctionRep& rep, const GridSpec& spec) {
    if (rep.kind == ConvexFunctionRep::Kind::Grid && rep.grid.spec == spec)
        return rep.grid;
    GridFn g(spec);
    for (std::size_t f = 0; f < g.values.size(); ++f) {
        if (rep.kind == ConvexFunctionRep::Kind::Grid) {
            Vec x = spec.point(spec.unflat(f));
            g.values[f] = rep.grid.spec.contains(x) ? rep.grid.interpolate(x) : kInf;
        } else {
            g.values[f] = rep.evaluate(spec.point(spec.unflat(f))).raw();
        }
    }
    return g;
}

} // namespace dcm
