#include "dcm/dual_curvature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dcm/convex_fn.hpp"
#include "dcm/parallel.hpp"
#include "dcm/quadrature.hpp"

namespace dcm {

EuclideanMeasure euclidean_dcm(const LogConcaveFunction& f, const Weight& w,
                               const QuadratureSpec& spec) {
    if (!f.support && !growth_check(f.phi))
        throw std::domain_error("moment may be infinite");
    const int n = f.dim();
    const double R = moment_box_radius(f, spec);
    auto nodes = weighted_nodes(n, R, w, spec);

    EuclideanMeasure m;
    m.dim = n;
    m.provenance = "pushforward " + std::to_string(spec.cells_per_axis);
    m.points.resize(nodes.size());
    m.weights.resize(nodes.size());
    parallel_chunks(nodes.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            double fx = f.value(nodes[i].x);
            if (fx <= 0.0) {
                m.points[i] = Vec::zero(n);
                m.weights[i] = 0.0;
                continue;
            }
            Vec y;
            try {
                y = f.phi.gradient(nodes[i].x);
            } catch (const std::domain_error&) {
                m.points[i] = Vec::zero(n);
                m.weights[i] = 0.0;
                continue;
            }
            m.points[i] = y;
            m.weights[i] = nodes[i].w * fx;
        }
    });
    return m;
}

SphericalMeasure spherical_dcm(const LogConcaveFunction& f, const Weight& w,
                               const QuadratureSpec& spec) {
    const int n = f.dim();
    SphericalMeasure m;
    m.dim = n;
    if (!f.support) return m;  // boundary at infinity carries no mass

    const ConvexBody& K = *f.support;
    if (K.kind == ConvexBody::Kind::Ball) {
        const double r = K.radius;
        auto sn = sphere_nodes(n, spec.sphere.n2_angles, spec.sphere.n3_polar,
                               spec.sphere.n3_azimuth);
        for (const auto& nd : sn) {
            Vec x = nd.u * r;
            m.add(nd.u, nd.weight * f.value(x) * w.omega(x, n) * std::pow(r, n - 1));
        }
        return m;
    }
    if (!K.origin_interior && w.kind == Weight::Kind::Power && w.q < 1.0)
        throw std::domain_error("non-integrable singularity");
    const double dist_tol = 1e-12 * (1.0 + K.circumradius());
    for (const auto& fc : K.facets) {
        if (fc.distance <= dist_tol && w.kind == Weight::Kind::Power && w.q < 1.0)
            throw std::domain_error("non-integrable singularity");
        double wgt = facet_integral(fc, n, [&](const Vec& x) {
            return f.value(x) * w.omega(x, n);
        });
        m.add(fc.unit_normal, wgt);
    }
    return m;
}

HypothesisFlags check_variational_hypotheses(const LogConcaveFunction& f) {
    HypothesisFlags flags;
    const int n = f.dim();
    const double fo = f.value(Vec::zero(n));
    const double M = f.max_value();
    flags.max_at_origin = fo >= M * (1.0 - 1e-9);

    // Dyadic shells |x| in [2^{-k-1}, 2^{-k}], alpha = 1/2.
    const double alpha = 0.5;
    auto dirs = sphere_nodes(n, 32, 8, 16);
    double early = 0.0, late = 0.0;
    for (int k = 1; k <= 8; ++k) {
        double ratio = 0.0;
        for (int j = 0; j < 4; ++j) {
            double r = std::pow(2.0, -k - 1) * (1.0 + j / 3.0);
            for (const auto& d : dirs) {
                Vec x = d.u * r;
                double fx;
                try {
                    fx = f.value(x);
                } catch (const std::domain_error&) {
                    continue;
                }
                ratio = std::max(ratio, std::abs(fx - fo) / std::pow(r, 1.0 + alpha));
            }
        }
        if (k <= 3)
            early = std::max(early, ratio);
        else if (k >= 6)
            late = std::max(late, ratio);
    }
    flags.shell_ratio_early = early;
    flags.shell_ratio_late = late;
    flags.shell_ok = late <= 2.0 * early + 1e-9;

    // R/r on sampled levels near the max.
    double rrmax = 1.0;
    bool any = false;
    for (double eps : {0.2, 0.05, 0.01, 1e-3}) {
        double s = M * (1.0 - eps);
        if (!(s > 0.0) || !(s < M)) continue;
        try {
            ConvexBody Ks = level_set(f, s);
            if (!Ks.origin_interior) {
                rrmax = std::numeric_limits<double>::infinity();
                any = true;
                continue;
            }
            rrmax = std::max(rrmax, Ks.circumradius() / Ks.inradius());
            any = true;
        } catch (const std::exception&) {
        }
    }
    flags.level_rr_max = any ? rrmax : std::numeric_limits<double>::infinity();
    flags.level_rr_ok = any && rrmax < 50.0;
    return flags;
}

namespace {

bool is_radial(const ConvexFunctionRep& rep) {
    using K = ConvexFunctionRep::Kind;
    switch (rep.kind) {
        case K::Quadratic:
        case K::ScaledNorm:
            return true;
        case K::BodyIndicator:
        case K::SupportFn:
            return rep.body->kind == ConvexBody::Kind::Ball;
        default:
            return false;
    }
}

// Exact radial route for radial f, g: the sup-convolution reduces to a 1-d
// conjugate of profiles, maximized by ternary search (the objective
// r s - c(s) is concave in s), and the moment to a single radial integral.
double radial_moment_of_convolution(const ConvexFunctionRep& phi_star,
                                    const ConvexFunctionRep& psi_star, double t,
                                    int dim, double q, double rmax) {
    auto c_of = [&](double s) {
        Vec y = Vec::axis(0, dim, s);
        ExtReal a = phi_star.evaluate(y);
        ExtReal b = psi_star.evaluate(y);
        if (!a.is_finite() || !b.is_finite())
            return std::numeric_limits<double>::infinity();
        return a.value() + t * b.value();
    };
    double sdom = std::min(phi_star.domain_radius(),
                           psi_star.has_bounded_domain() ? psi_star.domain_radius()
                                                         : std::numeric_limits<double>::infinity());

    auto phi_t = [&](double r) {
        // sup over s >= 0 of r s - c(s)
        double hi = std::isfinite(sdom) ? sdom * (1.0 - 1e-12) : 1.0;
        if (!std::isfinite(sdom)) {
            while (hi < 1e6) {
                double v1 = r * hi - c_of(hi);
                double v2 = r * (2.0 * hi) - c_of(2.0 * hi);
                if (!(v2 > v1)) break;
                hi *= 2.0;
            }
            hi *= 2.0;
        }
        double lo = 0.0;
        for (int it = 0; it < 200; ++it) {
            double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            double v1 = r * m1 - c_of(m1), v2 = r * m2 - c_of(m2);
            if (v1 < v2)
                lo = m1;
            else
                hi = m2;
            if (hi - lo < 1e-13 * (1.0 + hi)) break;
        }
        double s = 0.5 * (lo + hi);
        double best = std::max(r * s - c_of(s), r * 0.0 - c_of(0.0));
        return best;
    };

    // (1/q) int_0^{rmax^q} f_t(u^{1/q}) du removes the r^{q-1} factor.
    const double umax = std::pow(rmax, q);
    double integral = adaptive_line_integral(
        [&](double u) { return std::exp(-phi_t(std::pow(u, 1.0 / q))); }, 0.0, umax,
        1e-10 * umax, 44);
    return sphere_area(dim) * integral / q;
}

// Grid-route moment with exact conjugate evaluation near the origin, where
// interpolating the kinked phi_t would bias the weighted integrand.
double hybrid_grid_moment(const LogConcaveFunction& ft, const GridFn& combined,
                          const Weight& w, const QuadratureSpec& spec) {
    const int n = ft.dim();
    const double R = moment_box_radius(ft, spec);
    const double hp = ft.phi.kind == ConvexFunctionRep::Kind::Grid
                          ? ft.phi.grid.spec.spacing()
                          : 0.0;
    const double hybrid_r = 4.0 * hp;

    // finite dual nodes once
    std::vector<Vec> ys;
    std::vector<double> cs;
    const GridSpec& ds = combined.spec;
    for (std::size_t i = 0; i < combined.values.size(); ++i)
        if (std::isfinite(combined.values[i])) {
            ys.push_back(ds.point(ds.unflat(i)));
            cs.push_back(combined.values[i]);
        }
    auto exact_phi = [&](const Vec& x) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ys.size(); ++i)
            best = std::max(best, dot(x, ys[i]) - cs[i]);
        return best;
    };

    auto nodes = weighted_nodes(n, R, w, spec);
    return reduce_sum(nodes.size(), [&](std::size_t i) {
        const Vec& x = nodes[i].x;
        double val = (norm(x) <= hybrid_r) ? std::exp(-exact_phi(x)) : ft.value(x);
        return nodes[i].w * val;
    });
}

} // namespace

VariationalQuotients variational_lhs(const LogConcaveFunction& f,
                                     const LogConcaveFunction& g, const Weight& w,
                                     const std::vector<double>& ts,
                                     const QuadratureSpec& spec) {
    if (g.support == std::nullopt)
        throw std::invalid_argument("variational_lhs: g must be compactly supported");
    VariationalQuotients out;
    out.flags = check_variational_hypotheses(f);
    out.ts = ts.empty() ? std::vector<double>{0.1, 0.05, 0.025} : ts;
    std::sort(out.ts.rbegin(), out.ts.rend());
    for (double t : out.ts)
        if (!(t > 0)) throw std::invalid_argument("variational_lhs: t values must be positive");

    // All moments in the quotient run through one pipeline so that the
    // discretization bias cancels in the difference: closed-form catalog
    // pairs, the exact radial route for radial pairs, or the grid route with
    // near-origin exact conjugate evaluation.
    std::vector<double> all_ts = {0.0};
    all_ts.insert(all_ts.end(), out.ts.begin(), out.ts.end());
    std::vector<double> vs;

    if (sup_convolve_is_closed_form(f, g)) {
        for (double t : all_ts)
            vs.push_back(t == 0.0 ? moment(f, w, spec)
                                  : moment(sup_convolve(f, g, t), w, spec));
    } else if (is_radial(f.phi) && is_radial(g.phi) && w.kind == Weight::Kind::Power) {
        GridSpec dummy(f.dim(), 1.0, 3);
        ConvexFunctionRep phis = conjugate(f.phi, dummy);
        ConvexFunctionRep psis = conjugate(g.phi, dummy);
        double rmax = f.phi.suggested_box_radius(46.0);
        double rg = g.phi.suggested_box_radius(46.0);
        if (std::isfinite(rg)) rmax += out.ts.front() * std::min(rg, 8.0);
        if (!std::isfinite(rmax)) throw std::domain_error("moment may be infinite");
        for (double t : all_ts)
            vs.push_back(radial_moment_of_convolution(phis, psis, t, f.dim(), w.q, rmax));
    } else {
        SupConvolveGrids grids = default_work_grids(f, g, out.ts.front());
        ConvexFunctionRep phis = conjugate(f.phi, grids.dual);
        ConvexFunctionRep psis = conjugate(g.phi, grids.dual);
        GridFn a = sample_on_grid(phis, grids.dual);
        GridFn b = sample_on_grid(psis, grids.dual);
        const bool even = f.phi.even && g.phi.even;
        for (double t : all_ts) {
            GridFn comb(grids.dual);
            for (std::size_t i = 0; i < comb.values.size(); ++i) {
                double va = a.values[i], vb = b.values[i];
                comb.values[i] = (std::isinf(va) || std::isinf(vb))
                                     ? std::numeric_limits<double>::infinity()
                                     : va + t * vb;
            }
            GridFn chi = conjugate_grid(comb, grids.primal, even);
            LogConcaveFunction ft;
            ft.phi = ConvexFunctionRep::grid_sampled(std::move(chi), even, false);
            ft.support = std::nullopt;
            ft.max_location = Vec::zero(f.dim());
            vs.push_back(hybrid_grid_moment(ft, comb, w, spec));
        }
    }
    for (std::size_t i = 0; i < out.ts.size(); ++i)
        out.quotients.push_back((vs[i + 1] - vs[0]) / out.ts[i]);

    // First-order Richardson on successive pairs; the finest pair wins.
    double extrap = out.quotients.back();
    for (std::size_t i = 0; i + 1 < out.ts.size(); ++i) {
        double t1 = out.ts[i], t2 = out.ts[i + 1];
        double d1 = out.quotients[i], d2 = out.quotients[i + 1];
        extrap = (t1 * d2 - t2 * d1) / (t1 - t2);
    }
    out.extrapolated = extrap;
    return out;
}

double variational_rhs(const LogConcaveFunction& f, const LogConcaveFunction& g,
                       const Weight& w, const QuadratureSpec& spec) {
    if (g.support == std::nullopt)
        throw std::invalid_argument("variational_rhs: g must be compactly supported");
    EuclideanMeasure E = euclidean_dcm(f, w, spec);

    // psi* on a dual box covering the atom range (exact for catalog g).
    double atom_radius = 0.0;
    for (const auto& p : E.points) atom_radius = std::max(atom_radius, norm(p));
    GridSpec dual(f.dim(), std::max(atom_radius * (1.0 + 1e-9), 1e-6),
                  f.dim() == 3 ? 65 : 257);
    ConvexFunctionRep psis = conjugate(g.phi, dual);

    double term1 = integrate(E, [&](const Vec& y) {
        ExtReal v = psis.evaluate(y);
        if (!v.is_finite())
            throw std::domain_error("variational_rhs: psi* infinite at an atom");
        return v.value();
    });

    SphericalMeasure S = spherical_dcm(f, w, spec);
    const ConvexBody& Kg = *g.support;
    double term2 = integrate(S, [&](const Vec& v) { return Kg.support(v); });
    return term1 + term2;
}

double layer_cake_delta(const LogConcaveFunction& f, const ConvexBody& L,
                        const Weight& w, const QuadratureSpec& spec) {
    return coarea_tv(f, L, w, spec);
}

PairResult first_moment_identity(const LogConcaveFunction& f, const Weight& w,
                                 const QuadratureSpec& spec) {
    EuclideanMeasure E = euclidean_dcm(f, w, spec);
    double lhs = E.first_moment();
    // The right side runs on a deliberately different node set (offset
    // resolution and patch radius) so the identity is checked across two
    // discretizations, not one.
    QuadratureSpec other = spec;
    other.cells_per_axis = spec.cells_per_axis + spec.cells_per_axis / 2;
    const double R = moment_box_radius(f, spec);
    other.rho0 = 6.0 * R / other.cells_per_axis;
    double rhs = weighted_integral(
        f.dim(), R,
        [&](const Vec& x) {
            double fx = f.value(x);
            if (fx <= 0.0) return 0.0;
            try {
                return norm(f.phi.gradient(x)) * fx;
            } catch (const std::domain_error&) {
                return 0.0;
            }
        },
        w, other);
    return PairResult{lhs, rhs};
}

} // namespace dcm
