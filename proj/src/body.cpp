#include "dcm/body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dcm/parallel.hpp"
#include "dcm/quadrature.hpp"

namespace dcm {

namespace {

double tri_area(const Vec& a, const Vec& b, const Vec& c) {
    return 0.5 * norm(cross(b - a, c - a));
}

} // namespace

double Facet::area() const {
    double s = 0.0;
    for (const auto& sx : simplices) {
        if (sx.size() == 1)
            s += 1.0;  // H^0 counting measure
        else if (sx.size() == 2)
            s += norm(sx[1] - sx[0]);
        else
            s += tri_area(sx[0], sx[1], sx[2]);
    }
    return s;
}

ConvexBody ConvexBody::ball(double r, int dim) {
    if (!(r > 0)) throw std::invalid_argument("ball: radius must be positive");
    if (dim < 1 || dim > 3) throw std::invalid_argument("ball: dim must be 1..3");
    ConvexBody b;
    b.kind = Kind::Ball;
    b.dim = dim;
    b.radius = r;
    b.origin_interior = true;
    b.origin_symmetric = true;
    return b;
}

ConvexBody ConvexBody::box(int dim, const Vec& hw) {
    std::vector<Vec> pts;
    const int corners = 1 << dim;
    for (int c = 0; c < corners; ++c) {
        Vec v = Vec::zero(dim);
        for (int d = 0; d < dim; ++d) v[d] = (c & (1 << d)) ? hw[d] : -hw[d];
        pts.push_back(v);
    }
    return from_vertices(dim, pts);
}

ConvexBody ConvexBody::cross_polytope(int dim, double r) {
    std::vector<Vec> pts;
    for (int d = 0; d < dim; ++d) {
        pts.push_back(Vec::axis(d, dim, r));
        pts.push_back(Vec::axis(d, dim, -r));
    }
    return from_vertices(dim, pts);
}

ConvexBody ConvexBody::from_vertices(int dim, std::vector<Vec> pts) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("from_vertices: dim must be 1..3");
    if (pts.empty()) throw std::invalid_argument("from_vertices: empty vertex list");
    for (auto& p : pts) p.dim = dim;

    ConvexBody b;
    b.kind = Kind::Polytope;
    b.dim = dim;

    if (dim == 1) {
        double lo = pts[0][0], hi = pts[0][0];
        for (const auto& p : pts) {
            lo = std::min(lo, p[0]);
            hi = std::max(hi, p[0]);
        }
        if (!(hi > lo)) throw std::invalid_argument("from_vertices: degenerate interval");
        b.vertices = {Vec(lo, 1), Vec(hi, 1)};
    } else if (dim == 2) {
        b.vertices = convex_hull_2d(pts);
        if (b.vertices.size() < 3)
            throw std::invalid_argument("from_vertices: degenerate polygon");
    } else {
        auto tris = convex_hull_3d(pts);
        std::vector<char> used(pts.size(), 0);
        for (const auto& t : tris) used[t.a] = used[t.b] = used[t.c] = 1;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (used[i]) b.vertices.push_back(pts[i]);

        // Group hull triangles into geometric facets by plane.
        double scale = 0;
        for (const auto& p : b.vertices) scale = std::max(scale, norm(p));
        const double tol = 1e-9 * (1.0 + scale);
        for (const auto& t : tris) {
            Vec a = pts[t.a], bb = pts[t.b], c = pts[t.c];
            Vec nrm = normalized(cross(bb - a, c - a));
            double dist = dot(nrm, a);
            Facet* home = nullptr;
            for (auto& f : b.facets)
                if (norm(f.unit_normal - nrm) < 1e-9 && std::abs(f.distance - dist) < tol) {
                    home = &f;
                    break;
                }
            if (!home) {
                b.facets.push_back(Facet{nrm, dist, {}});
                home = &b.facets.back();
            }
            home->simplices.push_back({a, bb, c});
        }
    }

    b.build_facets_and_flags();
    return b;
}

void ConvexBody::build_facets_and_flags() {
    if (dim == 1) {
        facets.clear();
        facets.push_back(Facet{Vec(1.0, 1), vertices[1][0], {{vertices[1]}}});
        facets.push_back(Facet{Vec(-1.0, 1), -vertices[0][0], {{vertices[0]}}});
    } else if (dim == 2) {
        facets.clear();
        const std::size_t m = vertices.size();
        for (std::size_t i = 0; i < m; ++i) {
            const Vec& a = vertices[i];
            const Vec& c = vertices[(i + 1) % m];
            Vec e = c - a;
            Vec nrm = normalized(Vec(e[1], -e[0]));  // outward for CCW loop
            facets.push_back(Facet{nrm, dot(nrm, a), {{a, c}}});
        }
    }

    double scale = circumradius();
    const double tol = 1e-9 * (1.0 + scale);
    for (const auto& f : facets)
        for (const auto& v : vertices)
            if (dot(f.unit_normal, v) > f.distance + tol)
                throw std::invalid_argument("polytope: V-rep violates H-rep");

    origin_interior = true;
    for (const auto& f : facets)
        if (!(f.distance > tol)) origin_interior = false;

    origin_symmetric = true;
    const double stol = 1e-9 * (1.0 + scale);
    for (const auto& v : vertices) {
        bool found = false;
        for (const auto& w : vertices)
            if (norm(w + v) <= stol) {
                found = true;
                break;
            }
        if (!found) {
            origin_symmetric = false;
            break;
        }
    }
}

double ConvexBody::support(const Vec& y) const {
    if (kind == Kind::Ball) return radius * norm(y);
    double s = -std::numeric_limits<double>::infinity();
    for (const auto& v : vertices) s = std::max(s, dot(v, y));
    return s;
}

double ConvexBody::radial(const Vec& u) const {
    if (!origin_interior)
        throw std::invalid_argument("radial: origin must be interior");
    if (kind == Kind::Ball) return radius / norm(u);
    double rho = std::numeric_limits<double>::infinity();
    for (const auto& f : facets) {
        double den = dot(f.unit_normal, u);
        if (den > 0) rho = std::min(rho, f.distance / den);
    }
    return rho;
}

ConvexBody ConvexBody::polar() const {
    if (!origin_interior)
        throw std::invalid_argument("polar: origin must be interior");
    if (kind == Kind::Ball) return ball(1.0 / radius, dim);
    std::vector<Vec> pts;
    pts.reserve(facets.size());
    for (const auto& f : facets) pts.push_back(f.unit_normal * (1.0 / f.distance));
    return from_vertices(dim, pts);
}

ConvexBody ConvexBody::scaled(double lambda) const {
    if (!(lambda > 0)) throw std::invalid_argument("scaled: lambda must be positive");
    if (kind == Kind::Ball) return ball(lambda * radius, dim);
    std::vector<Vec> pts = vertices;
    for (auto& p : pts) p = p * lambda;
    return from_vertices(dim, pts);
}

bool ConvexBody::contains(const Vec& x, double slack) const {
    if (kind == Kind::Ball) return norm(x) <= radius + slack;
    for (const auto& f : facets)
        if (dot(f.unit_normal, x) > f.distance + slack) return false;
    return true;
}

double ConvexBody::inradius() const {
    if (kind == Kind::Ball) return radius;
    if (!origin_interior)
        throw std::invalid_argument("inradius: origin must be interior");
    double r = std::numeric_limits<double>::infinity();
    for (const auto& f : facets) r = std::min(r, f.distance);
    return r;
}

double ConvexBody::circumradius() const {
    if (kind == Kind::Ball) return radius;
    double r = 0;
    for (const auto& v : vertices) r = std::max(r, norm(v));
    return r;
}

Vec ConvexBody::support_gradient(const Vec& y) const {
    if (kind == Kind::Ball) {
        double n = norm(y);
        return n > 0 ? y * (radius / n) : Vec::zero(dim);
    }
    double best = support(y);
    double scale = circumradius() * norm(y);
    std::vector<Vec> arg;
    for (const auto& v : vertices)
        if (dot(v, y) >= best - 1e-12 * (1.0 + scale)) arg.push_back(v);
    if (arg.size() == 1) return arg[0];
    return min_norm_point(arg);
}

Radii inradius_circumradius(const ConvexBody& K) {
    return Radii{K.inradius(), K.circumradius()};
}

ConvexBody minkowski_sum(const ConvexBody& K, double t, const ConvexBody& L) {
    if (t < 0) throw std::invalid_argument("minkowski_sum: t must be >= 0");
    if (t == 0) return K;
    if (K.kind == ConvexBody::Kind::Ball && L.kind == ConvexBody::Kind::Ball)
        return ConvexBody::ball(K.radius + t * L.radius, K.dim);
    if (K.kind != L.kind)
        throw std::invalid_argument("minkowski_sum: mixed ball/polytope sum not representable");
    std::vector<Vec> pts;
    pts.reserve(K.vertices.size() * L.vertices.size());
    for (const auto& v : K.vertices)
        for (const auto& w : L.vertices) pts.push_back(v + w * t);
    return ConvexBody::from_vertices(K.dim, pts);
}

namespace {

double adaptive_triangle(const std::array<Vec, 3>& tri,
                         const std::function<double(const Vec&)>& g, double tol,
                         int depth) {
    auto centroid_est = [&](const Vec& a, const Vec& b, const Vec& c) {
        Vec m = (a + b + c) * (1.0 / 3.0);
        return tri_area(a, b, c) * g(m);
    };
    const Vec &a = tri[0], &b = tri[1], &c = tri[2];
    Vec mab = (a + b) * 0.5, mbc = (b + c) * 0.5, mca = (c + a) * 0.5;
    double whole = centroid_est(a, b, c);
    double parts[4] = {centroid_est(a, mab, mca), centroid_est(mab, b, mbc),
                       centroid_est(mca, mbc, c), centroid_est(mab, mbc, mca)};
    double refined = parts[0] + parts[1] + parts[2] + parts[3];
    if (depth <= 0 || std::abs(refined - whole) <= tol)
        return refined + (refined - whole) / 3.0;
    std::array<std::array<Vec, 3>, 4> children = {
        std::array<Vec, 3>{a, mab, mca}, std::array<Vec, 3>{mab, b, mbc},
        std::array<Vec, 3>{mca, mbc, c}, std::array<Vec, 3>{mab, mbc, mca}};
    double s = 0.0;
    for (const auto& ch : children) s += adaptive_triangle(ch, g, 0.25 * tol, depth - 1);
    return s;
}

double segment_integral(const Vec& p, const Vec& q,
                        const std::function<double(const Vec&)>& g, double tol) {
    Vec d = q - p;
    double len = norm(d);
    if (len == 0) return 0.0;
    // Split first at the point of the segment nearest the origin, so that
    // the bisection refines geometrically toward the near-singular peak.
    double tstar = -dot(p, d) / (len * len);
    auto line = [&](double a, double b) {
        return adaptive_line_integral(
            [&](double t) { return g(p + d * t) * len; }, a, b, tol, 48);
    };
    if (tstar > 1e-9 && tstar < 1.0 - 1e-9)
        return line(0.0, tstar) + line(tstar, 1.0);
    return line(0.0, 1.0);
}

double triangle_integral(const std::array<Vec, 3>& tri,
                         const std::function<double(const Vec&)>& g, double tol) {
    // Fan-split at the in-plane foot of the origin when it lies inside.
    const Vec &a = tri[0], &b = tri[1], &c = tri[2];
    Vec nrm = cross(b - a, c - a);
    double nn = norm2(nrm);
    if (nn > 0) {
        Vec foot = nrm * (dot(a, nrm) / nn);
        Vec e1 = b - a, e2 = c - a, r = foot - a;
        double d11 = dot(e1, e1), d12 = dot(e1, e2), d22 = dot(e2, e2);
        double det = d11 * d22 - d12 * d12;
        if (det > 0) {
            double s = (d22 * dot(r, e1) - d12 * dot(r, e2)) / det;
            double t = (d11 * dot(r, e2) - d12 * dot(r, e1)) / det;
            if (s > 1e-9 && t > 1e-9 && s + t < 1.0 - 1e-9) {
                double acc = 0.0;
                acc += adaptive_triangle({foot, a, b}, g, tol / 3.0, 40);
                acc += adaptive_triangle({foot, b, c}, g, tol / 3.0, 40);
                acc += adaptive_triangle({foot, c, a}, g, tol / 3.0, 40);
                return acc;
            }
        }
    }
    return adaptive_triangle(tri, g, tol, 40);
}

} // namespace

double facet_integral(const Facet& f, int dim,
                      const std::function<double(const Vec&)>& integrand) {
    if (dim == 1) return integrand(f.simplices[0][0]);

    // Rough scale for the absolute tolerance.
    double rough = 0.0;
    for (const auto& sx : f.simplices) {
        if (sx.size() == 2) {
            Vec m = (sx[0] + sx[1]) * 0.5;
            rough += norm(sx[1] - sx[0]) * std::abs(integrand(m));
        } else {
            Vec m = (sx[0] + sx[1] + sx[2]) * (1.0 / 3.0);
            rough += tri_area(sx[0], sx[1], sx[2]) * std::abs(integrand(m));
        }
    }
    const double tol = 1e-9 * (rough + 1e-12);

    double acc = 0.0;
    for (const auto& sx : f.simplices) {
        if (sx.size() == 2)
            acc += segment_integral(sx[0], sx[1], integrand, tol);
        else
            acc += triangle_integral({sx[0], sx[1], sx[2]}, integrand,
                                     tol * std::max(1.0, static_cast<double>(f.simplices.size())));
    }
    return acc;
}

double dual_quermass(const ConvexBody& K, double q, const SphereQuadSpec& sq) {
    if (!(q > 0)) throw std::invalid_argument("dual_quermass: q must be positive");
    if (K.kind == ConvexBody::Kind::Ball)
        return sphere_area(K.dim) * std::pow(K.radius, q) / q;
    if (!K.origin_interior)
        throw std::invalid_argument("dual_quermass: origin must be interior");
    auto nodes = sphere_nodes(K.dim, sq.n2_angles, sq.n3_polar, sq.n3_azimuth);
    double s = sphere_sum(nodes, [&](const Vec& u) { return std::pow(K.radial(u), q); });
    return s / q;
}

double normalized_dual_quermass(const ConvexBody& K, double q, const SphereQuadSpec& sq) {
    return std::pow(dual_quermass(K, q, sq), 1.0 / q);
}

SphericalMeasure dual_curvature_measure(const ConvexBody& K, double q,
                                        const SphereQuadSpec& sq) {
    if (!(q > 0)) throw std::invalid_argument("dual_curvature_measure: q must be positive");
    SphericalMeasure m;
    m.dim = K.dim;
    if (K.kind == ConvexBody::Kind::Ball) {
        const double rq = std::pow(K.radius, q);
        auto nodes = sphere_nodes(K.dim, sq.n2_angles, sq.n3_polar, sq.n3_azimuth);
        for (const auto& nd : nodes) m.add(nd.u, nd.weight * rq);
        return m;
    }
    const double dist_tol = 1e-12 * (1.0 + K.circumradius());
    for (const auto& f : K.facets) {
        double w;
        if (f.distance <= dist_tol) {
            if (q < 1.0)
                throw std::domain_error("non-integrable singularity");
            w = 0.0;  // x . nu vanishes identically on this facet
        } else {
            w = f.distance * facet_integral(f, K.dim, [&](const Vec& x) {
                    return std::pow(norm(x), q - K.dim);
                });
        }
        m.add(f.unit_normal, w);
    }
    return m;
}

SphericalMeasure pq_dual_curvature(const ConvexBody& K, double p, double q,
                                   const SphereQuadSpec& sq) {
    if (!(q > 0)) throw std::invalid_argument("pq_dual_curvature: q must be positive");
    SphericalMeasure m;
    m.dim = K.dim;
    if (K.kind == ConvexBody::Kind::Ball) {
        const double w0 = std::pow(K.radius, q - p);
        auto nodes = sphere_nodes(K.dim, sq.n2_angles, sq.n3_polar, sq.n3_azimuth);
        for (const auto& nd : nodes) m.add(nd.u, nd.weight * w0);
        return m;
    }
    const double dist_tol = 1e-12 * (1.0 + K.circumradius());
    for (const auto& f : K.facets) {
        if (f.distance <= dist_tol && (q < 1.0 || p > 0.0))
            throw std::domain_error("non-integrable singularity");
        double I = facet_integral(f, K.dim, [&](const Vec& x) {
            return std::pow(norm(x), q - K.dim);
        });
        m.add(f.unit_normal, std::pow(f.distance, 1.0 - p) * I);
    }
    return m;
}

double dual_mixed(const ConvexBody& K, const ConvexBody& L, double q,
                  const SphereQuadSpec& sq) {
    if (!(q > 0)) throw std::invalid_argument("dual_mixed: q must be positive");
    if (K.kind == ConvexBody::Kind::Ball) {
        const double rq1 = std::pow(K.radius, q - 1.0);
        auto nodes = sphere_nodes(K.dim, sq.n2_angles, sq.n3_polar, sq.n3_azimuth);
        return sphere_sum(nodes, [&](const Vec& u) { return L.support(u) * rq1; });
    }
    if (!K.origin_interior)
        throw std::invalid_argument("dual_mixed: origin must be interior to K");
    const double dist_tol = 1e-12 * (1.0 + K.circumradius());
    std::vector<double> terms;
    terms.reserve(K.facets.size());
    for (const auto& f : K.facets) {
        if (f.distance <= dist_tol && q < 1.0)
            throw std::domain_error("non-integrable singularity");
        double I = facet_integral(f, K.dim, [&](const Vec& x) {
            return std::pow(norm(x), q - K.dim);
        });
        terms.push_back(L.support(f.unit_normal) * I);
    }
    return pairwise_sum(terms);
}

} // namespace dcm
