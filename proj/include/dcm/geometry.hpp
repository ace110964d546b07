#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace dcm {

// Point/vector in R^n, n <= 3.  Unused trailing components stay zero, so
// dot/norm are dimension-agnostic.
struct Vec {
    std::array<double, 3> c{0.0, 0.0, 0.0};
    int dim = 0;

    Vec() = default;
    Vec(double x, int n) : c{x, 0, 0}, dim(n) {}
    Vec(double x, double y) : c{x, y, 0}, dim(2) {}
    Vec(double x, double y, double z) : c{x, y, z}, dim(3) {}

    static Vec zero(int n) {
        Vec v;
        v.dim = n;
        return v;
    }
    static Vec axis(int k, int n, double s = 1.0) {
        Vec v = zero(n);
        v.c[static_cast<std::size_t>(k)] = s;
        return v;
    }

    double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

    Vec operator+(const Vec& o) const {
        Vec r = *this;
        for (int i = 0; i < dim; ++i) r.c[i] += o.c[i];
        return r;
    }
    Vec operator-(const Vec& o) const {
        Vec r = *this;
        for (int i = 0; i < dim; ++i) r.c[i] -= o.c[i];
        return r;
    }
    Vec operator*(double s) const {
        Vec r = *this;
        for (int i = 0; i < dim; ++i) r.c[i] *= s;
        return r;
    }
    Vec operator-() const { return *this * -1.0; }
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (int i = 0; i < a.dim; ++i) s += a.c[i] * b.c[i];
    return s;
}
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }
inline Vec normalized(const Vec& a) {
    double n = norm(a);
    return n > 0 ? a * (1.0 / n) : a;
}
inline Vec cross(const Vec& a, const Vec& b) {
    Vec r = Vec::zero(3);
    r.c[0] = a.c[1] * b.c[2] - a.c[2] * b.c[1];
    r.c[1] = a.c[2] * b.c[0] - a.c[0] * b.c[2];
    r.c[2] = a.c[0] * b.c[1] - a.c[1] * b.c[0];
    return r;
}

// Extreme points of a planar point set, counterclockwise (monotone chain).
std::vector<Vec> convex_hull_2d(std::vector<Vec> pts);

// Triangular facets of the hull of a 3-d point set, outward orientation.
// Throws std::invalid_argument when the set is degenerate (affinely flat).
struct HullTri {
    int a, b, c;
};
std::vector<HullTri> convex_hull_3d(const std::vector<Vec>& pts);

// Minimal-norm point of the convex hull of up to one 2-face worth of points
// (coplanar input expected for >3 points).  Used as the subgradient
// tie-break.
Vec min_norm_point(const std::vector<Vec>& pts);

// Surface measure of the unit sphere S^{n-1}.
inline double sphere_area(int n) {
    switch (n) {
        case 1: return 2.0;
        case 2: return 2.0 * M_PI;
        default: return 4.0 * M_PI;
    }
}

} // namespace dcm
