#pragma once

#include <memory>
#include <vector>

#include "dcm/body.hpp"
#include "dcm/ext_real.hpp"
#include "dcm/grid.hpp"

namespace dcm {

struct AffinePiece {
    Vec slope;
    double offset = 0.0;
};

// Extended-real convex function on R^n: grid-sampled nodal values or a
// closed-form catalog entry.
class ConvexFunctionRep {
public:
    enum class Kind { Grid, Quadratic, ScaledNorm, BodyIndicator, SupportFn, MaxAffine };

    Kind kind = Kind::Quadratic;
    int dim = 1;
    bool even = false;

    GridFn grid;                              // Kind::Grid
    double quad_a = 1.0;                      // phi = quad_a * |x|^2 / 2 + offset
    double norm_c = 1.0;                      // phi = offset + norm_c * |x|
    double offset = 0.0;
    std::shared_ptr<const ConvexBody> body;   // indicator / support function
    std::vector<AffinePiece> pieces;          // max of affine pieces

    static ConvexFunctionRep quadratic(int dim, double a, double offset = 0.0);
    static ConvexFunctionRep scaled_norm(int dim, double c, double b = 0.0);
    static ConvexFunctionRep body_indicator(const ConvexBody& K, double offset = 0.0);
    static ConvexFunctionRep support_fn(const ConvexBody& K, double offset = 0.0);
    static ConvexFunctionRep max_affine(int dim, std::vector<AffinePiece> pieces);

    // Nodal grid function; validates discrete convexity and (when `even`)
    // exact symmetry unless `validated` is false (raw inputs for convexify).
    static ConvexFunctionRep grid_sampled(GridFn g, bool even, bool validated = true);

    ExtReal evaluate(const Vec& x) const;
    // Gradient where defined, minimal-norm subgradient at kinks.
    Vec gradient(const Vec& x) const;

    double min_value() const;
    Vec argmin() const;

    // Radius outside which phi >= drop along every ray (for quadrature
    // boxes); +inf means no finite bound is available.
    double suggested_box_radius(double drop) const;

    // Bound on |y| of the effective domain of the conjugate (max slope);
    // +inf when unbounded.
    double conjugate_domain_bound() const;

    bool has_bounded_domain() const;
    double domain_radius() const;  // circumradius of the effective domain
};

// Legendre-Fenchel conjugate.  Closed forms dispatch to exact formulas (the
// target grid is then ignored); grids use a per-dimension linear-time
// lower-envelope sweep onto `target`.
ConvexFunctionRep conjugate(const ConvexFunctionRep& rep, const GridSpec& target);

// Double conjugate (convex envelope).  Grid inputs round-trip through an
// automatically sized dual grid and return on their own grid.
ConvexFunctionRep convexify(const ConvexFunctionRep& rep);

// Raw grid-to-grid sweep used by conjugate/convexify and the solver.
GridFn conjugate_grid(const GridFn& in, const GridSpec& target, bool even);

// Samples any rep on a grid (exact nodal values for catalog entries).
GridFn sample_on_grid(const ConvexFunctionRep& rep, const GridSpec& spec);

} // namespace dcm
