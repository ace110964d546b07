#pragma once

#include <cstddef>
#include <vector>

#include "dcm/ext_real.hpp"
#include "dcm/geometry.hpp"

namespace dcm {

// Regular tensor grid on [-R, R]^n with an odd node count per axis, so the
// origin is exactly a lattice node.
struct GridSpec {
    int dim = 1;
    double R = 1.0;
    int N = 3;  // nodes per axis, odd

    GridSpec() = default;
    GridSpec(int dim_, double R_, int N_);

    double spacing() const { return 2.0 * R / (N - 1); }
    std::size_t node_count() const;
    int mid() const { return (N - 1) / 2; }

    // Axis coordinate of node index i; exact negation symmetry holds:
    // coord(N-1-i) == -coord(i).
    double coord(int i) const { return (i - mid()) * spacing(); }

    std::size_t flat(const std::array<int, 3>& idx) const;
    std::array<int, 3> unflat(std::size_t f) const;
    Vec point(const std::array<int, 3>& idx) const;
    bool contains(const Vec& x, double slack = 0.0) const;

    bool operator==(const GridSpec& o) const {
        return dim == o.dim && R == o.R && N == o.N;
    }
};

// Nodal values of an extended-real function on a GridSpec.  Values are raw
// doubles, finite or +inf (never NaN or -inf).
struct GridFn {
    GridSpec spec;
    std::vector<double> values;

    GridFn() = default;
    explicit GridFn(const GridSpec& s)
        : spec(s), values(s.node_count(), 0.0) {}

    double at(const std::array<int, 3>& idx) const { return values[spec.flat(idx)]; }
    double& at(const std::array<int, 3>& idx) { return values[spec.flat(idx)]; }

    // Multilinear interpolation over the finite region; +inf when any corner
    // of the containing cell is +inf.  Throws "out of domain" outside the box.
    double interpolate(const Vec& x) const;

    // Gradient of the multilinear interpolant in the containing cell; on cell
    // boundaries the per-axis minimal-norm one-sided rule is applied.
    Vec gradient(const Vec& x) const;

    bool has_finite() const;
    double min_finite() const;

    // Largest finite forward difference quotient over lattice edges; the
    // default dual box radius for conjugation.
    double max_slope() const;

    // x -> -x node symmetry, exact.
    bool is_even_exact() const;
    void symmetrize_even();  // v(x) <- value at canonical(|first nonzero| > 0) half

    // Midpoint convexity along axis and diagonal node directions within
    // 1e-9 * (1 + |value|), restricted to the finite region.
    bool is_discretely_convex(double tol = 1e-9) const;
};

} // namespace dcm
