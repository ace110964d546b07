#include "dcm/log_concave.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dcm {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::optional<ConvexBody> infer_support(const ConvexFunctionRep& phi) {
    using K = ConvexFunctionRep::Kind;
    switch (phi.kind) {
        case K::BodyIndicator:
            return *phi.body;
        case K::Grid: {
            // Hull of the finite nodes; empty when phi is finite everywhere
            // on the box is still a body (the box itself), but grids usually
            // represent globally finite functions -> treat full box as
            // unbounded only when every node is finite.
            const GridSpec& s = phi.grid.spec;
            bool all_finite = true;
            std::vector<Vec> pts;
            for (std::size_t f = 0; f < phi.grid.values.size(); ++f) {
                if (std::isfinite(phi.grid.values[f]))
                    pts.push_back(s.point(s.unflat(f)));
                else
                    all_finite = false;
            }
            if (all_finite) return std::nullopt;
            if (pts.empty()) throw std::invalid_argument("log-concave: empty effective domain");
            return ConvexBody::from_vertices(s.dim, pts);
        }
        default:
            return std::nullopt;
    }
}

} // namespace

LogConcaveFunction LogConcaveFunction::from_phi(ConvexFunctionRep phi) {
    auto sup = infer_support(phi);
    return from_phi(std::move(phi), std::move(sup));
}

LogConcaveFunction LogConcaveFunction::from_phi(ConvexFunctionRep phi,
                                                std::optional<ConvexBody> support) {
    LogConcaveFunction f;
    f.max_location = phi.argmin();
    f.phi = std::move(phi);
    f.support = std::move(support);
    if (!(f.max_value() > 0))
        throw std::invalid_argument("log-concave: function vanishes identically");
    return f;
}

SupConvolveGrids default_work_grids(const LogConcaveFunction& f,
                                    const LogConcaveFunction& g, double t) {
    const int n = f.dim();
    const double drop = 40.0;

    double rp;
    if (f.phi.kind == ConvexFunctionRep::Kind::Grid) {
        rp = f.phi.grid.spec.R;
    } else {
        rp = f.phi.suggested_box_radius(drop);
        if (!std::isfinite(rp)) rp = 16.0;
    }
    double rg = g.phi.suggested_box_radius(drop);
    if (std::isfinite(rg)) rp += t * std::min(rg, 8.0);

    // Dual box: intersection of the conjugate domains; fall back to slope
    // estimates when both are unbounded.
    double rd = std::min(f.phi.conjugate_domain_bound(), g.phi.conjugate_domain_bound());
    if (!std::isfinite(rd)) rd = 2.0 * rp;
    rd *= 1.0 + 1e-9;

    int np = (n == 3) ? 65 : 193;
    if (f.phi.kind == ConvexFunctionRep::Kind::Grid) np = f.phi.grid.spec.N;
    int nd = (n == 3) ? 65 : 257;
    return SupConvolveGrids{GridSpec(n, rp, np), GridSpec(n, rd, nd)};
}

namespace {

// Polytope stand-in for a ball, used only to keep support descriptors closed
// under mixed Minkowski sums.
ConvexBody ball_as_polytope(const ConvexBody& b) {
    if (b.dim == 1)
        return ConvexBody::from_vertices(1, {Vec(-b.radius, 1), Vec(b.radius, 1)});
    std::vector<Vec> pts;
    if (b.dim == 2) {
        const int m = 64;
        for (int j = 0; j < m; ++j) {
            double th = 2.0 * M_PI * j / m;
            pts.push_back(Vec(b.radius * std::cos(th), b.radius * std::sin(th)));
        }
    } else {
        const int mp = 12, ma = 24;
        for (int i = 1; i < mp; ++i)
            for (int j = 0; j < ma; ++j) {
                double th = M_PI * i / mp, ph = 2.0 * M_PI * j / ma;
                pts.push_back(Vec(b.radius * std::sin(th) * std::cos(ph),
                                  b.radius * std::sin(th) * std::sin(ph),
                                  b.radius * std::cos(th)));
            }
        pts.push_back(Vec(0, 0, b.radius));
        pts.push_back(Vec(0, 0, -b.radius));
    }
    return ConvexBody::from_vertices(b.dim, pts);
}

std::optional<ConvexBody> combine_supports(const LogConcaveFunction& f,
                                           const LogConcaveFunction& g, double t) {
    if (!f.support) return std::nullopt;
    if (t == 0.0 || !g.support) return f.support;  // unbounded g dominates
    try {
        return minkowski_sum(*f.support, t, *g.support);
    } catch (const std::invalid_argument&) {
        const ConvexBody& K = *f.support;
        const ConvexBody& L = *g.support;
        ConvexBody Kp = K.kind == ConvexBody::Kind::Ball ? ball_as_polytope(K) : K;
        ConvexBody Lp = L.kind == ConvexBody::Kind::Ball ? ball_as_polytope(L) : L;
        return minkowski_sum(Kp, t, Lp);
    }
}

LogConcaveFunction grid_route(const ConvexFunctionRep& phi, double cf,
                              const ConvexFunctionRep& psi, double cg,
                              const LogConcaveFunction& f,
                              const LogConcaveFunction& g, double t_support,
                              const SupConvolveGrids& work) {
    // e^{-(cf.phi* + cg.psi*)*}
    ConvexFunctionRep phis = conjugate(phi, work.dual);
    ConvexFunctionRep psis = conjugate(psi, work.dual);
    GridFn a = sample_on_grid(phis, work.dual);
    GridFn b = sample_on_grid(psis, work.dual);
    GridFn comb(work.dual);
    for (std::size_t i = 0; i < comb.values.size(); ++i) {
        double va = a.values[i], vb = b.values[i];
        comb.values[i] = (std::isinf(va) || std::isinf(vb)) ? kInf : cf * va + cg * vb;
    }
    const bool even = phi.even && psi.even;
    GridFn res = conjugate_grid(comb, work.primal, even);
    auto rep = ConvexFunctionRep::grid_sampled(std::move(res), even, false);
    return LogConcaveFunction::from_phi(std::move(rep), combine_supports(f, g, t_support));
}

} // namespace

bool sup_convolve_is_closed_form(const LogConcaveFunction& f,
                                 const LogConcaveFunction& g) {
    using K = ConvexFunctionRep::Kind;
    if (f.phi.kind == K::Quadratic && g.phi.kind == K::Quadratic) return true;
    if (f.phi.kind == K::BodyIndicator && g.phi.kind == K::BodyIndicator) {
        auto a = f.phi.body->kind, b = g.phi.body->kind;
        return a == b;  // summable without a polytope stand-in
    }
    return false;
}

LogConcaveFunction sup_convolve_on_grids(const LogConcaveFunction& f,
                                         const LogConcaveFunction& g, double t,
                                         const SupConvolveGrids& work) {
    if (t < 0) throw std::invalid_argument("sup_convolve: t must be >= 0");
    return grid_route(f.phi, 1.0, g.phi, t, f, g, t, work);
}

LogConcaveFunction sup_convolve(const LogConcaveFunction& f,
                                const LogConcaveFunction& g, double t,
                                const SupConvolveGrids* work) {
    if (t < 0) throw std::invalid_argument("sup_convolve: t must be >= 0");
    if (t == 0.0) return f;

    using K = ConvexFunctionRep::Kind;
    const auto& phi = f.phi;
    const auto& psi = g.phi;

    if (phi.kind == K::BodyIndicator && psi.kind == K::BodyIndicator) {
        try {
            ConvexBody sum = minkowski_sum(*phi.body, t, *psi.body);
            auto rep = ConvexFunctionRep::body_indicator(sum, phi.offset + t * psi.offset);
            return LogConcaveFunction::from_phi(std::move(rep), sum);
        } catch (const std::invalid_argument&) {
            // mixed ball/polytope: fall through to the grid route
        }
    }
    if (phi.kind == K::Quadratic && psi.kind == K::Quadratic) {
        double inv = 1.0 / phi.quad_a + t / psi.quad_a;
        auto rep = ConvexFunctionRep::quadratic(phi.dim, 1.0 / inv,
                                                phi.offset + t * psi.offset);
        return LogConcaveFunction::from_phi(std::move(rep), std::nullopt);
    }

    SupConvolveGrids grids = work ? *work : default_work_grids(f, g, t);
    return grid_route(phi, 1.0, psi, t, f, g, t, grids);
}

LogConcaveFunction sup_combination(const LogConcaveFunction& f,
                                   const LogConcaveFunction& g, double lambda,
                                   const SupConvolveGrids* work) {
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw std::invalid_argument("sup_combination: lambda must lie in (0,1)");
    using K = ConvexFunctionRep::Kind;
    const auto& phi = f.phi;
    const auto& psi = g.phi;

    if (phi.kind == K::BodyIndicator && psi.kind == K::BodyIndicator) {
        try {
            ConvexBody Ks = phi.body->scaled(1.0 - lambda);
            ConvexBody sum = minkowski_sum(Ks, lambda, *psi.body);
            auto rep = ConvexFunctionRep::body_indicator(
                sum, (1.0 - lambda) * phi.offset + lambda * psi.offset);
            return LogConcaveFunction::from_phi(std::move(rep), sum);
        } catch (const std::invalid_argument&) {
        }
    }
    if (phi.kind == K::Quadratic && psi.kind == K::Quadratic) {
        double inv = (1.0 - lambda) / phi.quad_a + lambda / psi.quad_a;
        auto rep = ConvexFunctionRep::quadratic(
            phi.dim, 1.0 / inv, (1.0 - lambda) * phi.offset + lambda * psi.offset);
        return LogConcaveFunction::from_phi(std::move(rep), std::nullopt);
    }

    SupConvolveGrids grids = work ? *work : default_work_grids(f, g, lambda);
    // support descriptor: (1-lambda)K_f + lambda K_g
    LogConcaveFunction fs = f;
    if (f.support) fs.support = f.support->scaled(1.0 - lambda);
    return grid_route(phi, 1.0 - lambda, psi, lambda, fs, g, lambda, grids);
}

ConvexBody level_set(const LogConcaveFunction& f, double s) {
    const double M = f.max_value();
    if (!(s > 0.0) || !(s < M))
        throw std::invalid_argument("level_set: s must lie strictly in (0, max f)");
    const double tau = -std::log(s);

    using K = ConvexFunctionRep::Kind;
    const auto& phi = f.phi;
    switch (phi.kind) {
        case K::Quadratic: {
            double r2 = 2.0 * (tau - phi.offset) / phi.quad_a;
            if (!(r2 > 0)) throw std::domain_error("level_set: empty level set");
            return ConvexBody::ball(std::sqrt(r2), phi.dim);
        }
        case K::ScaledNorm: {
            double r = (tau - phi.offset) / phi.norm_c;
            if (!(r > 0)) throw std::domain_error("level_set: empty level set");
            return ConvexBody::ball(r, phi.dim);
        }
        case K::BodyIndicator:
            return *phi.body;
        case K::SupportFn: {
            double c = tau - phi.offset;
            if (!(c > 0)) throw std::domain_error("level_set: empty level set");
            return phi.body->polar().scaled(c);
        }
        case K::MaxAffine: {
            // {max_i <s_i, x> + o_i <= tau}: enumerate hyperplane
            // intersections, keep the feasible ones, hull.
            const int n = phi.dim;
            std::vector<Vec> slopes;
            for (const auto& p : phi.pieces) slopes.push_back(p.slope);
            ConvexBody sh = ConvexBody::from_vertices(n, slopes);
            if (!sh.origin_interior)
                throw std::domain_error("level_set: unbounded level set");
            const std::size_t m = phi.pieces.size();
            std::vector<Vec> pts;
            auto feasible = [&](const Vec& x) {
                for (const auto& p : phi.pieces)
                    if (dot(p.slope, x) + p.offset > tau + 1e-9 * (1.0 + std::abs(tau)))
                        return false;
                return true;
            };
            if (n == 1) {
                for (std::size_t i = 0; i < m; ++i) {
                    double a = phi.pieces[i].slope[0];
                    if (a == 0) continue;
                    Vec x((tau - phi.pieces[i].offset) / a, 1);
                    if (feasible(x)) pts.push_back(x);
                }
            } else if (n == 2) {
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = i + 1; j < m; ++j) {
                        const auto &pi = phi.pieces[i], &pj = phi.pieces[j];
                        double det = pi.slope[0] * pj.slope[1] - pi.slope[1] * pj.slope[0];
                        if (std::abs(det) < 1e-14) continue;
                        double bi = tau - pi.offset, bj = tau - pj.offset;
                        Vec x((bi * pj.slope[1] - bj * pi.slope[1]) / det,
                              (pi.slope[0] * bj - pj.slope[0] * bi) / det);
                        if (feasible(x)) pts.push_back(x);
                    }
            } else {
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = i + 1; j < m; ++j)
                        for (std::size_t k = j + 1; k < m; ++k) {
                            const Vec &a = phi.pieces[i].slope, &b = phi.pieces[j].slope,
                                      &c = phi.pieces[k].slope;
                            double det = dot(a, cross(b, c));
                            if (std::abs(det) < 1e-14) continue;
                            double ra = tau - phi.pieces[i].offset;
                            double rb = tau - phi.pieces[j].offset;
                            double rc = tau - phi.pieces[k].offset;
                            Vec x = (cross(b, c) * ra + cross(c, a) * rb +
                                     cross(a, b) * rc) * (1.0 / det);
                            x.dim = 3;
                            if (feasible(x)) pts.push_back(x);
                        }
            }
            if (pts.empty()) throw std::domain_error("level_set: empty level set");
            return ConvexBody::from_vertices(n, pts);
        }
        case K::Grid: {
            const GridSpec& sp = phi.grid.spec;
            const int n = sp.dim;
            std::vector<Vec> pts;
            const std::size_t total = sp.node_count();
            for (std::size_t fl = 0; fl < total; ++fl) {
                auto idx = sp.unflat(fl);
                double v0 = phi.grid.values[fl];
                for (int d = 0; d < n; ++d) {
                    if (idx[d] + 1 >= sp.N) continue;
                    auto jdx = idx;
                    jdx[d] += 1;
                    double v1 = phi.grid.values[sp.flat(jdx)];
                    bool in0 = v0 <= tau, in1 = v1 <= tau;
                    if (in0 == in1) continue;
                    Vec a = sp.point(idx), b = sp.point(jdx);
                    double t;
                    if (std::isinf(v0) || std::isinf(v1))
                        t = 0.5;  // support boundary within one spacing
                    else
                        t = (tau - v0) / (v1 - v0);
                    pts.push_back(a + (b - a) * t);
                }
            }
            if (pts.empty()) throw std::domain_error("level_set: empty level set");
            return ConvexBody::from_vertices(n, pts);
        }
    }
    throw std::logic_error("unreachable");
}

} // namespace dcm
