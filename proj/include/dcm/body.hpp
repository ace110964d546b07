#pragma once

#include <functional>
#include <vector>

#include "dcm/geometry.hpp"
#include "dcm/measure.hpp"

namespace dcm {

// One geometric facet of a polytope: unit outward normal, signed distance of
// its hyperplane from the origin, and a simplex decomposition used by the
// boundary quadrature (point / segment / triangles for n = 1 / 2 / 3).
struct Facet {
    Vec unit_normal;
    double distance = 0.0;
    std::vector<std::vector<Vec>> simplices;

    double area() const;
};

// Spherical quadrature resolution: uniform midpoint angles in n=2,
// Gauss-Legendre (polar) x uniform (azimuth) product in n=3.
struct SphereQuadSpec {
    int n2_angles = 4096;
    int n3_polar = 128;
    int n3_azimuth = 256;
};

// Ball centered at the origin, or a polytope carrying both a V-rep (hull
// vertices) and an H-rep (facets), kept mutually consistent at construction.
class ConvexBody {
public:
    enum class Kind { Ball, Polytope };

    static ConvexBody ball(double r, int dim);
    static ConvexBody from_vertices(int dim, std::vector<Vec> pts);
    static ConvexBody box(int dim, const Vec& halfwidths);
    static ConvexBody cross_polytope(int dim, double r = 1.0);

    Kind kind = Kind::Ball;
    int dim = 1;
    double radius = 1.0;          // ball only
    std::vector<Vec> vertices;    // polytope V-rep
    std::vector<Facet> facets;    // polytope H-rep + geometry
    bool origin_interior = false;
    bool origin_symmetric = false;

    double support(const Vec& y) const;
    double radial(const Vec& u) const;  // unit u; requires origin interior
    ConvexBody polar() const;
    ConvexBody scaled(double lambda) const;
    bool contains(const Vec& x, double slack = 0.0) const;
    double inradius() const;
    double circumradius() const;

    // Support-function subgradient, minimal-norm tie-break.
    Vec support_gradient(const Vec& y) const;

private:
    void build_facets_and_flags();
};

ConvexBody minkowski_sum(const ConvexBody& K, double t, const ConvexBody& L);

// Adaptive integral of `integrand` over the boundary of a polytope facet
// (recursive simplex subdivision, refined toward the facet point nearest the
// origin; local estimates converged below ~1e-9 relative).
double facet_integral(const Facet& f, int dim,
                      const std::function<double(const Vec&)>& integrand);

// (1/q) * integral over S^{n-1} of rho_K^q; exact for balls.
double dual_quermass(const ConvexBody& K, double q,
                     const SphereQuadSpec& sq = SphereQuadSpec{});
double normalized_dual_quermass(const ConvexBody& K, double q,
                                const SphereQuadSpec& sq = SphereQuadSpec{});

// q-th dual curvature measure; one atom per polytope facet, angular samples
// for balls.
SphericalMeasure dual_curvature_measure(const ConvexBody& K, double q,
                                        const SphereQuadSpec& sq = SphereQuadSpec{});
SphericalMeasure pq_dual_curvature(const ConvexBody& K, double p, double q,
                                   const SphereQuadSpec& sq = SphereQuadSpec{});

// V1q(K, L) = integral of h_L over the (1,q)-dual curvature measure of K.
double dual_mixed(const ConvexBody& K, const ConvexBody& L, double q,
                  const SphereQuadSpec& sq = SphereQuadSpec{});

struct Radii {
    double inradius;
    double circumradius;
};
Radii inradius_circumradius(const ConvexBody& K);

} // namespace dcm
